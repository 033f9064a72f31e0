#pragma once

#include <string>
#include <vector>

namespace cellwarm::experiments {

// One sampled instant of a run. Column order in emitted CSV matches field
// order here. q_ptc is the electrical power of one film (the per-face
// input); q_gen is the volumetric electrochemical heat.
struct TraceRecord {
  double t = 0.0;                // s
  double applied_current = 0.0;  // A, > 0 discharges
  double v_ptc = 0.0;            // V
  double v_t = 0.0;              // terminal voltage, V
  double soc = 0.0;
  double t_m = 0.0;    // K
  double t_out = 0.0;  // K
  double t_avg = 0.0;  // K
  double t_range = 0.0;
  double q_gen = 0.0;  // W/m^3
  double q_ptc = 0.0;  // W per film
  double reward = 0.0; // hold reward, carried on the hold's final row
  bool hold_end = false;  // not a CSV column
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_record(const TraceRecord& r) = 0;
};

// Collects records in memory; write_csv can keep every substep or only the
// hold boundaries.
class TraceBuffer : public TraceSink {
 public:
  void on_record(const TraceRecord& r) override { records_.push_back(r); }
  const std::vector<TraceRecord>& records() const { return records_; }
  void clear() { records_.clear(); }

 private:
  std::vector<TraceRecord> records_;
};

std::string trace_csv_header();
std::string trace_csv_row(const TraceRecord& r);
// Atomic: writes to a temp file in the same directory, then renames.
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& records,
                     bool substeps);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace cellwarm::experiments
