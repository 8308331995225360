#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sclsim/aes.hpp"
#include "sclsim/floorplan.hpp"
#include "sclsim/op_kind.hpp"
#include "sclsim/rng.hpp"

namespace sclsim {

struct OpEvent {
  std::uint32_t time_idx = 0;
  std::uint32_t region_id = 0;
  OpKind kind = OpKind::sbox_out;
  std::uint8_t byte_index = 0;
  std::uint8_t value = 0;
  std::uint8_t prev_value = 0;
};

/// Events per encryption: initial AddRoundKey, nine full rounds of
/// SubBytes/MixColumns/AddRoundKey, and a final SubBytes/AddRoundKey.
inline constexpr std::size_t kEventsPerEncryption = 16 + 9 * 48 + 32;

/// Time step of the first round-1 S-box output.
inline constexpr std::uint32_t kRound1SboxStart = 16;

enum class LeakageMode : std::uint8_t { hamming_weight, hamming_distance };

struct LeakageModelParams {
  double alpha = 1.0;        // power units per bit
  double beta = 0.0;         // static power per event
  double sigma_noise = 0.0;  // additive Gaussian noise per cell
  LeakageMode mode = LeakageMode::hamming_weight;

  void validate() const;
};

struct TracedEncryption {
  Block plaintext{};
  Block key{};
  Block ciphertext{};
  std::vector<OpEvent> events;
};

/// Power per (time step, region) of one encryption, row-major by time.
struct RegionPowerTrace {
  std::size_t n_steps = 0;
  std::size_t n_regions = 0;
  std::vector<double> values;
  Block plaintext{};
  Block key{};
  Block ciphertext{};

  double& at(std::size_t t, std::size_t r) { return values[t * n_regions + r]; }
  double at(std::size_t t, std::size_t r) const { return values[t * n_regions + r]; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * n_regions, n_regions}; }
};

constexpr int hamming_weight(std::uint8_t v) { return __builtin_popcount(v); }

/// AES-128 that records one event per byte-level S-box, AddRoundKey and
/// MixColumns output. The schedule depends only on the floorplan.
TracedEncryption aes128_encrypt_traced(const Block& plaintext, const Block& key,
                                       const Floorplan& floorplan);

/// Reuses `out`'s storage; `out.events` is overwritten.
void aes128_encrypt_traced(const Block& plaintext, const RoundKeys& round_keys,
                           const Floorplan& floorplan, TracedEncryption& out);

RegionPowerTrace emit_power(const TracedEncryption& encryption, std::size_t n_regions,
                            const LeakageModelParams& params, Rng& rng);

void emit_power(const TracedEncryption& encryption, std::size_t n_regions,
                const LeakageModelParams& params, Rng& rng, RegionPowerTrace& out);

}  // namespace sclsim
