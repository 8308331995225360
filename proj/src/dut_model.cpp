#include "sclsim/dut_model.hpp"

#include <cmath>

#include "sclsim/errors.hpp"

namespace sclsim {

void LeakageModelParams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("leakage.alpha", "must be >= 0");
  if (!std::isfinite(beta)) throw ConfigError("leakage.beta", "must be finite");
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise))
    throw ConfigError("leakage.sigma_noise", "must be >= 0");
}

namespace {

class EventRecorder {
 public:
  EventRecorder(const Floorplan& floorplan, std::vector<OpEvent>& events)
      : floorplan_(floorplan), events_(events) {}

  void record(OpKind kind, std::size_t byte_index, std::uint8_t value, std::uint8_t prev) {
    OpEvent ev;
    ev.time_idx = static_cast<std::uint32_t>(events_.size());
    ev.region_id = floorplan_.region_of(kind, byte_index);
    ev.kind = kind;
    ev.byte_index = static_cast<std::uint8_t>(byte_index);
    ev.value = value;
    ev.prev_value = prev;
    events_.push_back(ev);
  }

 private:
  const Floorplan& floorplan_;
  std::vector<OpEvent>& events_;
};

void add_round_key(Block& state, const Block& rk, EventRecorder& rec) {
  for (std::size_t i = 0; i < 16; ++i) {
    const std::uint8_t prev = state[i];
    state[i] ^= rk[i];
    rec.record(OpKind::addroundkey_out, i, state[i], prev);
  }
}

void sub_bytes(Block& state, EventRecorder& rec) {
  for (std::size_t i = 0; i < 16; ++i) {
    const std::uint8_t prev = state[i];
    state[i] = aes::sbox(prev);
    rec.record(OpKind::sbox_out, i, state[i], prev);
  }
}

// Column-major state: byte i sits at row i % 4, column i / 4.
void shift_rows(Block& state) {
  const Block in = state;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) state[4 * c + r] = in[4 * ((c + r) % 4) + r];
}

void mix_columns(Block& state, EventRecorder& rec) {
  const Block in = state;
  for (std::size_t c = 0; c < 4; ++c) {
    const std::uint8_t* a = &in[4 * c];
    const std::uint8_t all = a[0] ^ a[1] ^ a[2] ^ a[3];
    for (std::size_t r = 0; r < 4; ++r)
      state[4 * c + r] = a[r] ^ all ^ aes::xtime(a[r] ^ a[(r + 1) % 4]);
  }
  for (std::size_t i = 0; i < 16; ++i) rec.record(OpKind::mixcolumns_out, i, state[i], in[i]);
}

}  // namespace

void aes128_encrypt_traced(const Block& plaintext, const RoundKeys& round_keys,
                           const Floorplan& floorplan, TracedEncryption& out) {
  out.plaintext = plaintext;
  out.key = round_keys[0];
  out.events.clear();
  out.events.reserve(kEventsPerEncryption);
  EventRecorder rec(floorplan, out.events);

  Block state = plaintext;
  add_round_key(state, round_keys[0], rec);
  for (std::size_t round = 1; round <= 10; ++round) {
    sub_bytes(state, rec);
    shift_rows(state);
    if (round != 10) mix_columns(state, rec);
    add_round_key(state, round_keys[round], rec);
  }
  out.ciphertext = state;
}

TracedEncryption aes128_encrypt_traced(const Block& plaintext, const Block& key,
                                       const Floorplan& floorplan) {
  TracedEncryption out;
  aes128_encrypt_traced(plaintext, aes::expand_key(key), floorplan, out);
  return out;
}

void emit_power(const TracedEncryption& encryption, std::size_t n_regions,
                const LeakageModelParams& params, Rng& rng, RegionPowerTrace& out) {
  const std::size_t n_steps = encryption.events.empty() ? 0 : encryption.events.back().time_idx + 1;
  out.n_steps = n_steps;
  out.n_regions = n_regions;
  out.values.resize(n_steps * n_regions);
  out.plaintext = encryption.plaintext;
  out.key = encryption.key;
  out.ciphertext = encryption.ciphertext;

  for (auto& v : out.values) v = rng.gaussian(params.sigma_noise);

  for (const auto& ev : encryption.events) {
    const std::uint8_t leaked =
        params.mode == LeakageMode::hamming_weight ? ev.value
                                                   : static_cast<std::uint8_t>(ev.value ^ ev.prev_value);
    out.at(ev.time_idx, ev.region_id) += params.alpha * hamming_weight(leaked) + params.beta;
  }
}

RegionPowerTrace emit_power(const TracedEncryption& encryption, std::size_t n_regions,
                            const LeakageModelParams& params, Rng& rng) {
  RegionPowerTrace out;
  emit_power(encryption, n_regions, params, rng, out);
  return out;
}

}  // namespace sclsim
