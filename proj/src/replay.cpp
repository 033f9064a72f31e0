#include "cellwarm/rl/replay.hpp"

#include "cellwarm/errors.hpp"
#include "cellwarm/serialize.hpp"

namespace cellwarm::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  data_.reserve(capacity_ < 4096 ? capacity_ : 4096);
}

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
  } else {
    data_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (data_.empty()) throw ConfigError("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = rng.uniform_index(data_.size());
  return idx;
}

void ReplayBuffer::save(std::ostream& out) const {
  io::write_u64(out, capacity_);
  io::write_u64(out, head_);
  io::write_u64(out, data_.size());
  for (const Transition& t : data_) {
    io::write_vec(out, t.obs);
    io::write_vec(out, t.u);
    io::write_f64(out, t.reward);
    io::write_vec(out, t.next_obs);
    io::write_u64(out, t.done ? 1 : 0);
    io::write_f64(out, t.behavior_log_prob);
  }
}

void ReplayBuffer::load(std::istream& in) {
  capacity_ = io::read_u64(in);
  head_ = io::read_u64(in);
  const std::uint64_t n = io::read_u64(in);
  if (capacity_ == 0 || n > capacity_ || head_ >= capacity_) {
    throw ConfigError("replay checkpoint is inconsistent");
  }
  data_.assign(n, Transition{});
  for (Transition& t : data_) {
    t.obs = io::read_vec(in);
    t.u = io::read_vec(in);
    t.reward = io::read_f64(in);
    t.next_obs = io::read_vec(in);
    t.done = io::read_u64(in) != 0;
    t.behavior_log_prob = io::read_f64(in);
  }
}

}  // namespace cellwarm::rl
