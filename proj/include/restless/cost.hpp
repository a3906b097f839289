#pragma once

// Error fractions from measurement bit streams, batch and streaming.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "restless/transmon.hpp"

namespace restless {

struct CostSample {
  double epsilon = 0.0;
  std::int64_t n_errors = 0;
  std::int64_t n_shots = 0;
  int n_cliffords = 0;
  Mode mode = Mode::Restless;
};

/// Fraction of shots that did not return |0>.
inline CostSample epsilon_conventional(std::span<const std::uint8_t> bits, int n_cliffords = 0) {
  if (bits.empty()) throw std::invalid_argument("epsilon_conventional: empty stream");
  std::int64_t errors = 0;
  for (auto b : bits) errors += (b != 0);
  const auto n = static_cast<std::int64_t>(bits.size());
  return {static_cast<double>(errors) / static_cast<double>(n), errors, n, n_cliffords, Mode::Conventional};
}

inline CostSample epsilon_conventional(const ShotStream& s) {
  if (s.mode != Mode::Conventional) throw std::invalid_argument("epsilon_conventional: stream is not conventional");
  return epsilon_conventional(s.bits, s.n_cliffords);
}

/// Count of consecutive equal outcomes divided by N (not N - 1): the first
/// shot has no predecessor but still counts in the divisor.
inline CostSample epsilon_restless(std::span<const std::uint8_t> bits, int n_cliffords = 0) {
  if (bits.size() < 2) throw std::invalid_argument("epsilon_restless: need at least 2 shots");
  std::int64_t errors = 0;
  for (std::size_t i = 1; i < bits.size(); ++i) errors += ((bits[i] != 0) == (bits[i - 1] != 0));
  const auto n = static_cast<std::int64_t>(bits.size());
  return {static_cast<double>(errors) / static_cast<double>(n), errors, n, n_cliffords, Mode::Restless};
}

inline CostSample epsilon_restless(const ShotStream& s) {
  if (s.mode != Mode::Restless) throw std::invalid_argument("epsilon_restless: stream is not restless");
  return epsilon_restless(s.bits, s.n_cliffords);
}

/// Real-time accumulator fed with ordered chunks of a stream. Chunks carry a
/// sequence number; the boundary bit of the previous chunk is kept so the
/// result equals the batch value on the concatenated stream.
class RestlessAccumulator {
 public:
  explicit RestlessAccumulator(Mode mode = Mode::Restless, int n_cliffords = 0)
      : mode_(mode), n_cliffords_(n_cliffords) {}

  void push(std::uint64_t sequence_number, std::span<const std::uint8_t> chunk) {
    if (sequence_number != next_sequence_)
      throw std::runtime_error("RestlessAccumulator: out-of-order chunk " + std::to_string(sequence_number) +
                               ", expected " + std::to_string(next_sequence_));
    ++next_sequence_;
    for (auto raw : chunk) {
      const bool b = raw != 0;
      if (mode_ == Mode::Conventional) {
        errors_ += b;
      } else if (last_) {
        errors_ += (b == *last_);
      }
      if (!first_) first_ = b;
      last_ = b;
      ++n_;
    }
  }

  /// Append another accumulator that followed this one in stream order.
  void merge(const RestlessAccumulator& next) {
    if (next.mode_ != mode_) throw std::invalid_argument("RestlessAccumulator: mode mismatch in merge");
    if (next.n_ == 0) return;
    errors_ += next.errors_;
    if (mode_ == Mode::Restless && last_ && next.first_) errors_ += (*last_ == *next.first_);
    if (!first_) first_ = next.first_;
    last_ = next.last_;
    n_ += next.n_;
  }

  std::int64_t n_shots() const { return n_; }
  std::uint64_t next_sequence() const { return next_sequence_; }

  CostSample result() const {
    if (mode_ == Mode::Restless && n_ < 2) throw std::invalid_argument("epsilon_streaming: need at least 2 shots");
    if (n_ == 0) throw std::invalid_argument("epsilon_streaming: empty stream");
    return {static_cast<double>(errors_) / static_cast<double>(n_), errors_, n_, n_cliffords_, mode_};
  }

 private:
  Mode mode_;
  int n_cliffords_;
  std::int64_t errors_ = 0;
  std::int64_t n_ = 0;
  std::optional<bool> first_;
  std::optional<bool> last_;
  std::uint64_t next_sequence_ = 0;
};

inline CostSample epsilon(const ShotStream& s) {
  return s.mode == Mode::Restless ? epsilon_restless(s) : epsilon_conventional(s);
}

}  // namespace restless
