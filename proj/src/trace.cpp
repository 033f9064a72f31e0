#include "cellwarm/exp/trace.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cellwarm/errors.hpp"

namespace cellwarm::experiments {

std::string trace_csv_header() {
  return "t,applied_current,v_ptc,v_t,soc,t_m,t_out,t_avg,t_range,q_gen,q_ptc,reward";
}

namespace {

void append_field(std::string& line, double v, bool first = false) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  if (!first) line.push_back(',');
  line += buf;
}

}  // namespace

std::string trace_csv_row(const TraceRecord& r) {
  std::string line;
  line.reserve(220);
  append_field(line, r.t, true);
  append_field(line, r.applied_current);
  append_field(line, r.v_ptc);
  append_field(line, r.v_t);
  append_field(line, r.soc);
  append_field(line, r.t_m);
  append_field(line, r.t_out);
  append_field(line, r.t_avg);
  append_field(line, r.t_range);
  append_field(line, r.q_gen);
  append_field(line, r.q_ptc);
  append_field(line, r.reward);
  return line;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& records,
                     bool substeps) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp =
      target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out << trace_csv_header() << '\n';
    for (std::size_t i = 0; i < records.size(); ++i) {
      // The anchor row (t = 0) and hold boundaries always survive filtering.
      if (!substeps && i > 0 && !records[i].hold_end) continue;
      out << trace_csv_row(records[i]) << '\n';
    }
    out.flush();
    if (!out) throw ConfigError("failed while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + " is empty");
  if (line == trace_csv_header() + "\r") line.pop_back();
  if (line != trace_csv_header()) throw ConfigError(path + " has an unexpected header");
  std::vector<TraceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 12> f{};
    const char* p = line.c_str();
    for (int k = 0; k < 12; ++k) {
      char* end = nullptr;
      errno = 0;
      f[static_cast<std::size_t>(k)] = std::strtod(p, &end);
      if (end == p || errno == ERANGE) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number");
      }
      p = end;
      if (k < 11) {
        if (*p != ',') {
          throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 12 fields");
        }
        ++p;
      }
    }
    if (*p != '\0') {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": trailing characters");
    }
    TraceRecord r;
    r.t = f[0];
    r.applied_current = f[1];
    r.v_ptc = f[2];
    r.v_t = f[3];
    r.soc = f[4];
    r.t_m = f[5];
    r.t_out = f[6];
    r.t_avg = f[7];
    r.t_range = f[8];
    r.q_gen = f[9];
    r.q_ptc = f[10];
    r.reward = f[11];
    r.hold_end = true;  // rows in a file are the emitted boundaries
    records.push_back(r);
  }
  return records;
}

}  // namespace cellwarm::experiments
