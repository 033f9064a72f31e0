#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace cellwarm {

// Deterministic RNG with explicit bit-level derivations so results are
// reproducible across standard library implementations. std::mt19937_64
// supplies the raw stream; uniforms and normals are built by hand instead of
// going through std::*_distribution.
class Rng {
 public:
  Rng() : engine_(0x9e3779b97f4a7c15ull) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). Rejection-free modulo is fine here: n is far
  // below 2^64 in every use, so the bias is < 2^-40.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  // Standard normal via Box-Muller. The pair's second member is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  // Derives an independent stream: distinct tags give decorrelated engines.
  Rng fork(std::uint64_t tag) {
    const std::uint64_t s = engine_() ^ (tag * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull);
    return Rng(s);
  }

  void save(std::ostream& out) const {
    std::ostringstream text;
    text << engine_;
    const std::string s = text.str();
    const std::uint64_t n = s.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(s.data(), static_cast<std::streamsize>(n));
    const std::uint8_t spare_flag = has_spare_ ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&spare_flag), 1);
    out.write(reinterpret_cast<const char*>(&spare_), sizeof spare_);
  }

  void load(std::istream& in) {
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    std::istringstream text(s);
    text >> engine_;
    std::uint8_t spare_flag = 0;
    in.read(reinterpret_cast<char*>(&spare_flag), 1);
    has_spare_ = spare_flag != 0;
    in.read(reinterpret_cast<char*>(&spare_), sizeof spare_);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cellwarm
