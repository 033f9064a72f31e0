#pragma once

#include <filesystem>
#include <memory>

#include "cellwarm/rl/replay.hpp"
#include "cellwarm/rl/trainer.hpp"
#include "cellwarm/rng.hpp"

namespace cellwarm::rl {

// Everything a training run needs to continue exactly where it stopped:
// reloading and running k more episodes produces the same parameters, bit
// for bit, as running k more episodes without the round trip.
struct TrainSession {
  std::unique_ptr<Trainer> trainer;
  ReplayBuffer buffer{100000};
  Rng loop_rng;  // exploration draws, batch sampling, update-time draws
  Rng env_rng;   // snapshot of the environment's generator
  long episodes_done = 0;
  long env_steps = 0;
};

// File layout: magic, format version, trainer kind, trainer blob (policy
// block first), replay buffer, both generators, counters. The file appears
// atomically: written to a temporary and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const TrainSession& s);
TrainSession load_checkpoint(const std::filesystem::path& path);

// Reads only the leading policy block. Enough to act; the critic, optimizer
// state, and buffer are skipped.
GaussianPolicy load_policy(const std::filesystem::path& path);

}  // namespace cellwarm::rl
