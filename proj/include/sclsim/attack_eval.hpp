#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sclsim/aes.hpp"
#include "sclsim/detection.hpp"

namespace sclsim {

/// Externally observable power of a set of encryptions. Column j holds time
/// step `first_time_idx + j`.
struct AttackTraceSet {
  std::size_t n_traces = 0;
  std::size_t n_samples = 0;
  std::uint32_t first_time_idx = 0;
  std::vector<Block> plaintexts;
  std::vector<double> observable;  // row-major [trace][sample]

  AttackTraceSet() = default;
  explicit AttackTraceSet(std::size_t samples, std::uint32_t first_time = 0)
      : n_samples(samples), first_time_idx(first_time) {}

  void append(const Block& plaintext, std::span<const double> row);
  std::span<const double> row(std::size_t trace) const {
    return {observable.data() + trace * n_samples, n_samples};
  }
  std::vector<double> column(std::size_t sample) const;
};

StatResult pearson_checked(std::span<const double> x, std::span<const double> y) noexcept;
/// Throws LengthMismatch, InsufficientSamples (n < 2) or DegenerateVariance.
double pearson(std::span<const double> x, std::span<const double> y);

/// HW(Sbox(plaintext_byte ^ guess)).
int cpa_model(std::uint8_t plaintext_byte, std::uint8_t guess);

struct KeyRankResult {
  std::uint8_t byte_index = 0;
  std::array<std::uint8_t, 256> ranked_guesses{};  // by max |corr| desc, ties by key asc
  std::array<double, 256> max_abs_corr{};          // indexed by guess
  std::array<std::uint32_t, 256> best_sample{};    // column of the max, by guess
  std::size_t rank_of_true_key = 0;
};

/// Correlation power analysis on the round-1 S-box output of one byte.
/// Degenerate columns are skipped; throws AllColumnsDegenerate when nothing
/// is left to correlate.
KeyRankResult cpa_rank(const AttackTraceSet& traces, std::uint8_t byte_index,
                       std::uint8_t true_key_byte);

/// Streaming CPA: per-guess and per-column co-moments updated one trace at a
/// time, so ranks are available at any trace count.
class CpaAccumulator {
 public:
  CpaAccumulator(std::uint8_t byte_index, std::size_t n_samples);

  void add(const Block& plaintext, std::span<const double> row);
  std::size_t count() const { return n_; }
  KeyRankResult rank(std::uint8_t true_key_byte) const;

 private:
  std::uint8_t byte_index_;
  std::size_t n_samples_;
  std::size_t n_ = 0;
  std::array<double, 256> mean_m_{};
  std::array<double, 256> m2_m_{};
  std::vector<double> mean_x_;
  std::vector<double> m2_x_;
  std::vector<double> co_;  // [guess][sample]
  std::vector<double> dx_;
};

/// Produces the next trace; returns false once exhausted.
using TraceGenerator = std::function<bool(Block& plaintext, std::vector<double>& row)>;

/// Smallest multiple of `step` at which the true key ranks first and still
/// ranks first at the next checkpoint. std::nullopt means not disclosed
/// within `max_traces`.
std::optional<std::size_t> measurements_to_disclosure(const TraceGenerator& next,
                                                      std::size_t n_samples,
                                                      std::uint8_t byte_index,
                                                      std::uint8_t true_key_byte,
                                                      std::size_t step, std::size_t max_traces);

/// Same, over a recorded trace set (its first `max_traces` rows).
std::optional<std::size_t> measurements_to_disclosure(const AttackTraceSet& traces,
                                                      std::uint8_t byte_index,
                                                      std::uint8_t true_key_byte,
                                                      std::size_t step, std::size_t max_traces);

}  // namespace sclsim
