#pragma once

#include <filesystem>

#include "cellwarm/exp/scenario.hpp"

namespace cellwarm::experiments {

struct TrainResult {
  std::filesystem::path final_checkpoint;
  long episodes_done = 0;
  long env_steps = 0;
  long updates = 0;
};

// Runs (or resumes) one training session. Writes metrics.csv (one row per
// episode), checkpoint_ep<N>.ckpt every checkpoint_every episodes and
// checkpoint_final.ckpt at the end, all under out_dir. Resuming from a
// checkpoint continues the exact trajectory the uninterrupted run would have
// taken.
TrainResult train_policy(const RunConfig& cfg, const std::filesystem::path& out_dir,
                         std::uint64_t seed,
                         const std::filesystem::path& resume_from = {});

}  // namespace cellwarm::experiments
