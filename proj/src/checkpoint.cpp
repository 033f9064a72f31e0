#include "cellwarm/rl/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "cellwarm/errors.hpp"
#include "cellwarm/serialize.hpp"

namespace cellwarm::rl {

namespace {

constexpr char kMagic[4] = {'C', 'W', 'C', 'K'};
constexpr std::uint64_t kVersion = 1;

std::ifstream open_checkpoint(const std::filesystem::path& path, std::string* kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError(path.string() + " is not a checkpoint file");
  }
  const std::uint64_t version = io::read_u64(in);
  if (version != kVersion) {
    throw ConfigError("unsupported checkpoint version in " + path.string());
  }
  *kind = io::read_string(in);
  return in;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainSession& s) {
  if (!s.trainer) throw ConfigError("cannot checkpoint a session without a trainer");
  const std::filesystem::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(kMagic, 4);
    io::write_u64(out, kVersion);
    io::write_string(out, s.trainer->kind());
    s.trainer->save(out);
    s.buffer.save(out);
    s.loop_rng.save(out);
    s.env_rng.save(out);
    io::write_u64(out, static_cast<std::uint64_t>(s.episodes_done));
    io::write_u64(out, static_cast<std::uint64_t>(s.env_steps));
    out.flush();
    if (!out) throw ConfigError("failed while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TrainSession load_checkpoint(const std::filesystem::path& path) {
  std::string kind;
  std::ifstream in = open_checkpoint(path, &kind);
  TrainSession s;
  s.trainer = make_empty_trainer(kind);
  s.trainer->load(in);
  s.buffer.load(in);
  s.loop_rng.load(in);
  s.env_rng.load(in);
  s.episodes_done = static_cast<long>(io::read_u64(in));
  s.env_steps = static_cast<long>(io::read_u64(in));
  return s;
}

GaussianPolicy load_policy(const std::filesystem::path& path) {
  std::string kind;
  std::ifstream in = open_checkpoint(path, &kind);
  GaussianPolicy p;
  p.load(in);
  return p;
}

}  // namespace cellwarm::rl
