#pragma once

#include <map>
#include <string>
#include <vector>

namespace cellwarm {

// Flat "key = value" file. '#' starts a comment, blank lines are skipped,
// keys are dotted paths. Values are scalars or comma-separated lists.
class KvFile {
 public:
  KvFile() = default;

  static KvFile load(const std::string& path);
  static KvFile from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

  // Serializes back to the file format, keys sorted.
  std::string to_string() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace cellwarm
