#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "sclsim/attack_eval.hpp"
#include "sclsim/countermeasures.hpp"
#include "sclsim/dut_model.hpp"
#include "sclsim/errors.hpp"

using namespace sclsim;

namespace {

const Block kKey = *parse_hex_block("2b7e151628aed2a6abf7158809cf4f3c");

Block random_block(Rng& rng) {
  Block b{};
  for (auto& x : b) x = rng.byte();
  return b;
}

// Total power over regions for steps [0, n_samples) of noiseless HW traces,
// optionally passed through a countermeasure on every region.
AttackTraceSet dut_traces(std::size_t n, std::size_t n_samples, std::uint64_t seed, double sigma = 0.0,
                          const CountermeasureKind* cm = nullptr) {
  const auto fp = Floorplan::grid(4, 4);
  Rng rng(seed);
  AttackTraceSet set(n_samples);
  std::vector<double> row(n_samples);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pt = random_block(rng);
    const auto enc = aes128_encrypt_traced(pt, kKey, fp);
    auto tr = emit_power(enc, 16, {1.0, 0.0, sigma, LeakageMode::hamming_weight}, rng);
    if (cm) {
      for (std::size_t r = 0; r < 16; ++r) {
        std::vector<double> series(tr.n_steps);
        for (std::size_t t = 0; t < tr.n_steps; ++t) series[t] = tr.at(t, r);
        apply_cm(series, *cm, rng);
        for (std::size_t t = 0; t < tr.n_steps; ++t) tr.at(t, r) = series[t];
      }
    }
    for (std::size_t t = 0; t < n_samples; ++t) {
      double total = 0.0;
      for (double v : tr.row(t)) total += v;
      row[t] = total;
    }
    set.append(pt, row);
  }
  return set;
}

AttackTraceSet noise_traces(std::size_t n, std::size_t n_samples, Rng& rng) {
  AttackTraceSet set(n_samples);
  std::vector<double> row(n_samples);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = rng.gaussian(1.0);
    set.append(random_block(rng), row);
  }
  return set;
}

}  // namespace

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4, 7};
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) - 0.98198) <= 1e-4);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), LengthMismatch);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateVariance);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), InsufficientSamples);
}

TEST_CASE("cpa_model") {
  CHECK(cpa_model(0x00, 0x2b) == hamming_weight(aes::sbox(0x2b)));
  CHECK(cpa_model(0x2b, 0x2b) == hamming_weight(0x63));
}

TEST_CASE("noiseless CPA ranks the true key first with correlation 1") {
  const auto set = dut_traces(256, 48, 1);
  const auto r = cpa_rank(set, 0, kKey[0]);
  CHECK(r.rank_of_true_key == 0);
  CHECK(r.ranked_guesses[0] == kKey[0]);
  CHECK(std::abs(r.max_abs_corr[kKey[0]] - 1.0) <= 1e-9);
  CHECK(r.best_sample[kKey[0]] == kRound1SboxStart);

  std::set<int> perm(r.ranked_guesses.begin(), r.ranked_guesses.end());
  CHECK(perm.size() == 256);
}

TEST_CASE("other byte positions are recoverable") {
  const auto set = dut_traces(300, 48, 2, 1.0);
  for (std::uint8_t b : {0, 5, 15}) CHECK(cpa_rank(set, b, kKey[b]).rank_of_true_key == 0);
}

TEST_CASE("pure noise gives an uninformative rank") {
  Rng rng(3);
  std::vector<std::size_t> ranks;
  for (int trial = 0; trial < 100; ++trial) ranks.push_back(cpa_rank(noise_traces(1000, 4, rng), 0, 0x2b).rank_of_true_key);
  std::nth_element(ranks.begin(), ranks.begin() + 50, ranks.end());
  CHECK(ranks[50] >= 64);
}

TEST_CASE("ranking is deterministic with key-ascending ties") {
  const auto set = dut_traces(64, 20, 4, 0.5);
  const auto a = cpa_rank(set, 0, kKey[0]);
  const auto b = cpa_rank(set, 0, kKey[0]);
  CHECK(a.ranked_guesses == b.ranked_guesses);
  for (std::size_t i = 1; i < 256; ++i) {
    const double hi = a.max_abs_corr[a.ranked_guesses[i - 1]];
    const double lo = a.max_abs_corr[a.ranked_guesses[i]];
    CHECK(hi >= lo);
    if (hi == lo) CHECK(a.ranked_guesses[i - 1] < a.ranked_guesses[i]);
  }
  // All-constant but one column: guesses sharing a model vector tie exactly.
  AttackTraceSet flat(2);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const auto pt = random_block(rng);
    const std::vector<double> row{1.0, static_cast<double>(pt[0] & 1)};
    flat.append(pt, row);
  }
  const auto f = cpa_rank(flat, 0, 0);
  for (std::size_t i = 1; i < 256; ++i)
    if (f.max_abs_corr[f.ranked_guesses[i - 1]] == f.max_abs_corr[f.ranked_guesses[i]])
      CHECK(f.ranked_guesses[i - 1] < f.ranked_guesses[i]);
}

TEST_CASE("scale invariance") {
  const auto set = dut_traces(200, 24, 5, 2.0);
  auto scaled = set;
  for (auto& v : scaled.observable) v *= 37.5;
  const auto a = cpa_rank(set, 0, kKey[0]);
  const auto b = cpa_rank(scaled, 0, kKey[0]);
  CHECK(a.ranked_guesses == b.ranked_guesses);
  for (int k = 0; k < 256; ++k) CHECK(std::abs(a.max_abs_corr[k] - b.max_abs_corr[k]) <= 1e-9);
}

TEST_CASE("streaming CPA agrees with batch CPA") {
  const auto set = dut_traces(500, 32, 7, 3.0);
  CpaAccumulator acc(0, set.n_samples);
  for (std::size_t i = 0; i < set.n_traces; ++i) acc.add(set.plaintexts[i], set.row(i));
  CHECK(acc.count() == 500);
  const auto s = acc.rank(kKey[0]);
  const auto b = cpa_rank(set, 0, kKey[0]);
  for (int k = 0; k < 256; ++k) CHECK(std::abs(s.max_abs_corr[k] - b.max_abs_corr[k]) <= 1e-9);
  CHECK(s.rank_of_true_key == b.rank_of_true_key);
  CHECK(s.ranked_guesses == b.ranked_guesses);
}

TEST_CASE("measurements_to_disclosure") {
  SUBCASE("noiseless traces disclose at the first checkpoint") {
    const auto set = dut_traces(256, 48, 8);
    CHECK(measurements_to_disclosure(set, 0, kKey[0], 16, 256) == std::optional<std::size_t>(16));
  }
  SUBCASE("pure noise is not disclosed") {
    Rng rng(9);
    const auto set = noise_traces(2000, 4, rng);
    CHECK_FALSE(measurements_to_disclosure(set, 0, kKey[0], 100, 2000).has_value());
  }
  SUBCASE("step beyond max_traces") {
    const auto set = dut_traces(64, 48, 10);
    CHECK_FALSE(measurements_to_disclosure(set, 0, kKey[0], 65, 64).has_value());
  }
  SUBCASE("generator form") {
    const auto set = dut_traces(128, 48, 11);
    std::size_t i = 0;
    TraceGenerator gen = [&](Block& pt, std::vector<double>& row) {
      if (i >= set.n_traces) return false;
      pt = set.plaintexts[i];
      row.assign(set.row(i).begin(), set.row(i).end());
      ++i;
      return true;
    };
    CHECK(measurements_to_disclosure(gen, 48, 0, kKey[0], 16, 128) == std::optional<std::size_t>(16));
  }
}

TEST_CASE("full equalization starves the attack") {
  const Equalizer eq{1.0, 0.0};
  const CountermeasureKind cm = eq;
  const auto set = dut_traces(200, 48, 12, 0.0, &cm);
  for (std::size_t s = 0; s < set.n_samples; ++s) {
    const auto col = set.column(s);
    std::vector<double> m(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) m[i] = cpa_model(set.plaintexts[i][0], kKey[0]);
    CHECK_THROWS_AS(pearson(m, col), DegenerateVariance);
  }
  CHECK_THROWS_AS(cpa_rank(set, 0, kKey[0]), AllColumnsDegenerate);
  CHECK_FALSE(measurements_to_disclosure(set, 0, kKey[0], 16, 200).has_value());
}
