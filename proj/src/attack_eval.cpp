#include "sclsim/attack_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sclsim/dut_model.hpp"
#include "sclsim/errors.hpp"

namespace sclsim {

void AttackTraceSet::append(const Block& plaintext, std::span<const double> row) {
  if (row.size() != n_samples) throw LengthMismatch("attack_eval");
  plaintexts.push_back(plaintext);
  observable.insert(observable.end(), row.begin(), row.end());
  ++n_traces;
}

std::vector<double> AttackTraceSet::column(std::size_t sample) const {
  std::vector<double> out(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) out[i] = observable[i * n_samples + sample];
  return out;
}

StatResult pearson_checked(std::span<const double> x, std::span<const double> y) noexcept {
  if (x.size() < 2 || x.size() != y.size()) return {StatStatus::insufficient_samples, 0.0};
  // Running means stay exact on constant input, so constant vectors give
  // exactly zero deviations.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    mx += (x[i] - mx) / k;
    my += (y[i] - my) / k;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {StatStatus::degenerate_variance, 0.0};
  return {StatStatus::ok, std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0)};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("attack_eval");
  const auto r = pearson_checked(x, y);
  if (r.status == StatStatus::insufficient_samples) throw InsufficientSamples("attack_eval");
  if (r.status == StatStatus::degenerate_variance) throw DegenerateVariance("attack_eval");
  return r.value;
}

int cpa_model(std::uint8_t plaintext_byte, std::uint8_t guess) {
  return hamming_weight(aes::sbox(static_cast<std::uint8_t>(plaintext_byte ^ guess)));
}

namespace {

void finish_ranking(KeyRankResult& result, std::uint8_t true_key_byte) {
  std::array<std::uint16_t, 256> order{};
  std::iota(order.begin(), order.end(), std::uint16_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::uint16_t a, std::uint16_t b) {
    return result.max_abs_corr[a] > result.max_abs_corr[b];
  });
  for (std::size_t i = 0; i < 256; ++i) {
    result.ranked_guesses[i] = static_cast<std::uint8_t>(order[i]);
    if (order[i] == true_key_byte) result.rank_of_true_key = i;
  }
}

}  // namespace

KeyRankResult cpa_rank(const AttackTraceSet& traces, std::uint8_t byte_index,
                       std::uint8_t true_key_byte) {
  if (traces.n_traces < 2) throw InsufficientSamples("attack_eval");
  KeyRankResult result;
  result.byte_index = byte_index;

  std::vector<std::vector<double>> columns(traces.n_samples);
  for (std::size_t t = 0; t < traces.n_samples; ++t) columns[t] = traces.column(t);

  bool any = false;
  std::vector<double> model(traces.n_traces);
  for (int k = 0; k < 256; ++k) {
    for (std::size_t i = 0; i < traces.n_traces; ++i)
      model[i] = cpa_model(traces.plaintexts[i][byte_index], static_cast<std::uint8_t>(k));
    double best = 0.0;
    std::uint32_t best_t = 0;
    for (std::size_t t = 0; t < traces.n_samples; ++t) {
      const auto r = pearson_checked(model, columns[t]);
      if (!r.ok()) continue;
      any = true;
      if (std::abs(r.value) > best) {
        best = std::abs(r.value);
        best_t = static_cast<std::uint32_t>(t);
      }
    }
    result.max_abs_corr[k] = best;
    result.best_sample[k] = best_t;
  }
  if (!any) throw AllColumnsDegenerate();
  finish_ranking(result, true_key_byte);
  return result;
}

CpaAccumulator::CpaAccumulator(std::uint8_t byte_index, std::size_t n_samples)
    : byte_index_(byte_index),
      n_samples_(n_samples),
      mean_x_(n_samples, 0.0),
      m2_x_(n_samples, 0.0),
      co_(256 * n_samples, 0.0),
      dx_(n_samples, 0.0) {}

void CpaAccumulator::add(const Block& plaintext, std::span<const double> row) {
  if (row.size() != n_samples_) throw LengthMismatch("attack_eval");
  ++n_;
  const double n = static_cast<double>(n_);
  for (std::size_t t = 0; t < n_samples_; ++t) {
    const double d = row[t] - mean_x_[t];
    dx_[t] = d;
    mean_x_[t] += d / n;
    m2_x_[t] += d * (row[t] - mean_x_[t]);
  }
  const std::uint8_t p = plaintext[byte_index_];
  for (int k = 0; k < 256; ++k) {
    const double m = cpa_model(p, static_cast<std::uint8_t>(k));
    const double dm = m - mean_m_[k];
    mean_m_[k] += dm / n;
    const double dm_new = m - mean_m_[k];
    m2_m_[k] += dm * dm_new;
    double* co = co_.data() + static_cast<std::size_t>(k) * n_samples_;
    for (std::size_t t = 0; t < n_samples_; ++t) co[t] += dx_[t] * dm_new;
  }
}

KeyRankResult CpaAccumulator::rank(std::uint8_t true_key_byte) const {
  if (n_ < 2) throw InsufficientSamples("attack_eval");
  KeyRankResult result;
  result.byte_index = byte_index_;
  bool any = false;
  for (int k = 0; k < 256; ++k) {
    double best = 0.0;
    std::uint32_t best_t = 0;
    if (m2_m_[k] != 0.0) {
      const double* co = co_.data() + static_cast<std::size_t>(k) * n_samples_;
      for (std::size_t t = 0; t < n_samples_; ++t) {
        if (m2_x_[t] == 0.0) continue;
        any = true;
        const double r = std::min(1.0, std::abs(co[t]) / std::sqrt(m2_m_[k] * m2_x_[t]));
        if (r > best) {
          best = r;
          best_t = static_cast<std::uint32_t>(t);
        }
      }
    }
    result.max_abs_corr[k] = best;
    result.best_sample[k] = best_t;
  }
  if (!any) throw AllColumnsDegenerate();
  finish_ranking(result, true_key_byte);
  return result;
}

std::optional<std::size_t> measurements_to_disclosure(const TraceGenerator& next,
                                                      std::size_t n_samples,
                                                      std::uint8_t byte_index,
                                                      std::uint8_t true_key_byte,
                                                      std::size_t step, std::size_t max_traces) {
  if (step == 0 || step > max_traces) return std::nullopt;
  CpaAccumulator acc(byte_index, n_samples);
  Block plaintext{};
  std::vector<double> row;

  auto ranks_first = [&]() {
    if (acc.count() < 2) return false;
    try {
      return acc.rank(true_key_byte).rank_of_true_key == 0;
    } catch (const AllColumnsDegenerate&) {
      return false;
    }
  };

  std::optional<std::size_t> candidate;
  for (std::size_t checkpoint = step; checkpoint <= max_traces; checkpoint += step) {
    while (acc.count() < checkpoint) {
      if (!next(plaintext, row)) return std::nullopt;
      acc.add(plaintext, row);
    }
    if (ranks_first()) {
      if (candidate) return candidate;
      candidate = checkpoint;
    } else {
      candidate.reset();
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> measurements_to_disclosure(const AttackTraceSet& traces,
                                                      std::uint8_t byte_index,
                                                      std::uint8_t true_key_byte,
                                                      std::size_t step, std::size_t max_traces) {
  std::size_t cursor = 0;
  TraceGenerator next = [&](Block& plaintext, std::vector<double>& row) {
    if (cursor >= traces.n_traces) return false;
    plaintext = traces.plaintexts[cursor];
    const auto r = traces.row(cursor);
    row.assign(r.begin(), r.end());
    ++cursor;
    return true;
  };
  return measurements_to_disclosure(next, traces.n_samples, byte_index, true_key_byte, step,
                                    max_traces);
}

}  // namespace sclsim
