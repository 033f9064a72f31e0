#include "cellwarm/kvfile.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cellwarm/errors.hpp"

namespace cellwarm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(context + ": empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw ConfigError(context + ": cannot parse '" + t + "' as a number");
  }
  return v;
}

}  // namespace

KvFile KvFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

KvFile KvFile::from_string(const std::string& text, const std::string& origin) {
  KvFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    f.values_[key] = value;
  }
  return f;
}

bool KvFile::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& KvFile::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(origin_ + ": missing key '" + key + "'");
  }
  return it->second;
}

double KvFile::get_double(const std::string& key) const {
  return parse_double(raw(key), origin_ + ": key '" + key + "'");
}

double KvFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KvFile::get_int(const std::string& key) const {
  const double v = get_double(key);
  const long long i = static_cast<long long>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer");
  }
  return i;
}

long long KvFile::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KvFile::get_bool(const std::string& key) const {
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean");
}

bool KvFile::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::string KvFile::get_string(const std::string& key) const { return raw(key); }

std::string KvFile::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::vector<double> KvFile::get_doubles(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = v.find(',', pos);
    const std::string item =
        comma == std::string::npos ? v.substr(pos) : v.substr(pos, comma - pos);
    out.push_back(parse_double(item, origin_ + ": key '" + key + "'"));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void KvFile::set(const std::string& key, const std::string& value) { values_[key] = value; }

void KvFile::set_double(const std::string& key, double value) {
  std::ostringstream s;
  s.precision(17);
  s << value;
  values_[key] = s.str();
}

std::vector<std::string> KvFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  return out;
}

std::string KvFile::to_string() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace cellwarm
