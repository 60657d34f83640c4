#pragma once

#include <cstddef>
#include <vector>

#include "mocco/errors.hpp"
#include "mocco/rng.hpp"

namespace mocco::replay {

struct Transition {
  std::vector<double> state, action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;  // true terminal state; time-limit truncation stores false
};

struct MCRecord {
  std::vector<double> state, action;
  double mc_return = 0.0;  // discounted return from this step to episode end
};

// Bounded FIFO store: once full, the oldest entry is overwritten first.
// Storage grows lazily up to capacity. Single-owner, not thread safe.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("RingBuffer: capacity must be positive");
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[cursor_] = std::move(item);
      cursor_ = (cursor_ + 1) % capacity_;
    }
  }

  size_t size() const { return items_.size(); }
  size_t capacity() const { return capacity_; }

  // Storage-order access (the order is immaterial for uniform sampling).
  const T& operator[](size_t i) const { return items_[i]; }

  // Insertion-order access: index 0 is the oldest surviving entry.
  const T& oldest(size_t i) const {
    return items_.size() < capacity_ ? items_[i] : items_[(cursor_ + i) % capacity_];
  }

 private:
  size_t capacity_;
  std::vector<T> items_;
  size_t cursor_ = 0;  // next slot to overwrite once full
};

// Per-episode staging area, flushed into the main and MC buffers at episode
// end.
class EpisodeBuffer {
 public:
  void stage(Transition t) { staged_.push_back(std::move(t)); }
  size_t size() const { return staged_.size(); }
  bool empty() const { return staged_.empty(); }
  const std::vector<Transition>& staged() const { return staged_; }
  void clear() { staged_.clear(); }

 private:
  std::vector<Transition> staged_;
};

// R_i = r_i + gamma * R_{i+1}, R_last = r_last. Empty input gives empty
// output. The recurrence is evaluated exactly as written so callers can
// verify it bitwise.
std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma);

// Flushes a finished episode: every staged transition goes to `main`, every
// (state, action, R_i) goes to `mc`, and the staging buffer is emptied.
// Calling with an empty staging buffer is a no-op.
void finalize_episode(EpisodeBuffer& episodic, RingBuffer<Transition>& main_buffer,
                      RingBuffer<MCRecord>& mc_buffer, double gamma);

// Uniform sample with replacement. Returns false (and leaves `out` empty)
// when the buffer holds fewer than batch_size entries.
template <typename T>
bool sample_uniform(const RingBuffer<T>& buffer, size_t batch_size, RandomStream& rng,
                    std::vector<const T*>& out) {
  out.clear();
  if (buffer.size() < batch_size) return false;
  out.reserve(batch_size);
  for (size_t k = 0; k < batch_size; ++k)
    out.push_back(&buffer[rng.integer(buffer.size())]);
  return true;
}

}  // namespace mocco::replay
