#include "sclsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sclsim/errors.hpp"

namespace sclsim {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::calibrate: return "calibrate";
    case Mode::run: return "run";
    case Mode::attack: return "attack";
    case Mode::sweep: return "sweep";
  }
  return "?";
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::off: return "off";
    case Regime::forced_on: return "forced_on";
    case Regime::adaptive: return "adaptive";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (auto m : {Mode::calibrate, Mode::run, Mode::attack, Mode::sweep})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key, "expected a finite number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    v.remove_prefix(2);
    base = 16;
  }
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

template <typename T>
T to_bounded(const std::string& key, std::string_view v, std::uint64_t max) {
  const auto u = to_uint(key, v);
  if (u > max) throw ConfigError(key, "value out of range");
  return static_cast<T>(u);
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true/false");
}

Block to_block(const std::string& key, std::string_view v) {
  auto b = parse_hex_block(v);
  if (!b) throw ConfigError(key, "expected 32 hex digits");
  return *b;
}

std::vector<double> to_double_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  for (auto part : split(v, ',')) out.push_back(to_double(key, part));
  return out;
}

std::vector<std::uint32_t> to_uint_list(const std::string& key, std::string_view v) {
  std::vector<std::uint32_t> out;
  for (auto part : split(v, ','))
    out.push_back(to_bounded<std::uint32_t>(key, part, UINT32_MAX));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

CountermeasureKind default_kind(std::string_view name, const std::string& key) {
  if (name == "noise_injector") return NoiseInjector{32.0};
  if (name == "equalizer") return Equalizer{1.0, 0.0};
  if (name == "random_delay") return RandomDelay{0};
  throw ConfigError(key, "unknown countermeasure kind '" + std::string(name) + "'");
}

// Applies one countermeasure key (suffix after the prefix) to `cm`.
bool apply_cm_key(ArmedCountermeasure& cm, const std::string& key, std::string_view field,
                  std::string_view value) {
  if (field == "kind") {
    if (kind_name(cm.kind) != value) cm.kind = default_kind(value, key);
  } else if (field == "sigma_cm") {
    auto* n = std::get_if<NoiseInjector>(&cm.kind);
    if (!n) throw ConfigError(key, "only valid for noise_injector");
    n->sigma_cm = to_double(key, value);
  } else if (field == "strength") {
    auto* e = std::get_if<Equalizer>(&cm.kind);
    if (!e) throw ConfigError(key, "only valid for equalizer");
    e->strength = to_double(key, value);
  } else if (field == "target") {
    auto* e = std::get_if<Equalizer>(&cm.kind);
    if (!e) throw ConfigError(key, "only valid for equalizer");
    if (value == "auto") {
      cm.auto_target = true;
      e->target = 0.0;
    } else {
      cm.auto_target = false;
      e->target = to_double(key, value);
    }
  } else if (field == "max_shift") {
    auto* d = std::get_if<RandomDelay>(&cm.kind);
    if (!d) throw ConfigError(key, "only valid for random_delay");
    d->max_shift = to_bounded<std::uint32_t>(key, value, UINT32_MAX);
  } else {
    return false;
  }
  return true;
}

void emit_cm(KeyValues& out, const std::string& prefix, const ArmedCountermeasure& cm) {
  out.emplace_back(prefix + ".kind", kind_name(cm.kind));
  if (const auto* n = std::get_if<NoiseInjector>(&cm.kind)) {
    out.emplace_back(prefix + ".sigma_cm", format_double(n->sigma_cm));
  } else if (const auto* e = std::get_if<Equalizer>(&cm.kind)) {
    out.emplace_back(prefix + ".strength", format_double(e->strength));
    out.emplace_back(prefix + ".target", cm.auto_target ? "auto" : format_double(e->target));
  } else if (const auto* d = std::get_if<RandomDelay>(&cm.kind)) {
    out.emplace_back(prefix + ".max_shift", std::to_string(d->max_shift));
  }
}

// Orders countermeasure fields so that `kind` is applied before its
// parameters.
int cm_field_rank(std::string_view field) { return field == "kind" ? 0 : 1; }

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty())
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

ExperimentConfig apply_key_values(ExperimentConfig cfg, const KeyValues& entries) {
  // Last occurrence wins; application order is fixed by stage below.
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : entries) kv[k] = v;

  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  // Geometry first: the default op map depends on the region list.
  bool geometry_changed = false;
  if (auto v = take("floorplan.width")) {
    cfg.floorplan.width = static_cast<std::int32_t>(to_bounded<std::uint32_t>("floorplan.width", *v, 1u << 16));
    geometry_changed = true;
  }
  if (auto v = take("floorplan.height")) {
    cfg.floorplan.height = static_cast<std::int32_t>(to_bounded<std::uint32_t>("floorplan.height", *v, 1u << 16));
    geometry_changed = true;
  }
  auto regions = take("floorplan.regions");
  if (geometry_changed || regions) {
    const auto op_map = cfg.floorplan.op_map;
    const auto old_regions = cfg.floorplan.regions.size();
    auto fp = Floorplan::grid(cfg.floorplan.width, cfg.floorplan.height);
    if (regions && *regions != "grid") {
      fp.regions.clear();
      for (auto cell : split(*regions, ';')) {
        auto xy = split(cell, ',');
        if (xy.size() != 2) throw ConfigError("floorplan.regions", "expected x,y;x,y;...");
        fp.regions.push_back(
            {static_cast<std::int32_t>(to_bounded<std::uint32_t>("floorplan.regions", xy[0], 1u << 16)),
             static_cast<std::int32_t>(to_bounded<std::uint32_t>("floorplan.regions", xy[1], 1u << 16))});
      }
      const auto n = static_cast<std::uint32_t>(fp.regions.size());
      for (auto& row : fp.op_map)
        for (std::uint32_t i = 0; i < 16; ++i) row[i] = n == 0 ? 0 : i % n;
    }
    if (fp.regions.size() == old_regions) fp.op_map = op_map;
    cfg.floorplan = std::move(fp);
  }
  for (std::size_t k = 0; k < kOpKindCount; ++k) {
    const std::string key = "floorplan.op_map." + std::string(kOpKindNames[k]);
    if (auto v = take(key)) {
      auto ids = to_uint_list(key, *v);
      if (ids.size() == 1) ids.assign(16, ids[0]);
      if (ids.size() != 16) throw ConfigError(key, "expected 1 or 16 region ids");
      std::copy(ids.begin(), ids.end(), cfg.floorplan.op_map[k].begin());
    }
  }

  if (auto v = take("mode")) {
    auto m = parse_mode(*v);
    if (!m) throw ConfigError("mode", "expected calibrate|run|attack|sweep");
    cfg.mode = *m;
  }
  if (auto v = take("seed")) cfg.seed = to_uint("seed", *v);
  if (auto v = take("n_traces")) cfg.n_traces = to_uint("n_traces", *v);
  if (auto v = take("key")) cfg.key = to_block("key", *v);
  if (auto v = take("fixed_plaintext")) cfg.fixed_plaintext = to_block("fixed_plaintext", *v);
  if (auto v = take("threads")) cfg.threads = to_bounded<unsigned>("threads", *v, 1024);

  if (auto v = take("sensors.n_sensors"))
    cfg.sensors.n_sensors = to_bounded<std::uint32_t>("sensors.n_sensors", *v, 1u << 20);
  if (auto v = take("sensors.f0")) cfg.sensors.params.f0 = to_double("sensors.f0", *v);
  if (auto v = take("sensors.gamma")) cfg.sensors.params.gamma = to_double("sensors.gamma", *v);
  if (auto v = take("sensors.window"))
    cfg.sensors.params.window = to_bounded<std::uint32_t>("sensors.window", *v, 1u << 20);
  if (auto v = take("sensors.sigma_jitter"))
    cfg.sensors.params.sigma_jitter = to_double("sensors.sigma_jitter", *v);
  if (auto v = take("sensors.kernel_scale"))
    cfg.sensors.kernel_scale = to_double("sensors.kernel_scale", *v);

  if (auto v = take("leakage.alpha")) cfg.leakage.alpha = to_double("leakage.alpha", *v);
  if (auto v = take("leakage.beta")) cfg.leakage.beta = to_double("leakage.beta", *v);
  if (auto v = take("leakage.sigma_noise")) cfg.leakage.sigma_noise = to_double("leakage.sigma_noise", *v);
  if (auto v = take("leakage.mode")) {
    if (*v == "hamming_weight") cfg.leakage.mode = LeakageMode::hamming_weight;
    else if (*v == "hamming_distance") cfg.leakage.mode = LeakageMode::hamming_distance;
    else throw ConfigError("leakage.mode", "expected hamming_weight|hamming_distance");
  }

  if (auto v = take("detector.kind")) {
    if (*v == "nicv") cfg.detector.kind.type = DetectorKind::Type::nicv;
    else if (*v == "tvla_fixed_random") cfg.detector.kind.type = DetectorKind::Type::tvla_fixed_random;
    else throw ConfigError("detector.kind", "expected nicv|tvla_fixed_random");
  }
  if (auto v = take("detector.byte_index"))
    cfg.detector.kind.byte_index = to_bounded<std::uint8_t>("detector.byte_index", *v, 255);
  if (auto v = take("detector.score_scale")) cfg.detector.score_scale = to_double("detector.score_scale", *v);
  if (auto v = take("detector.min_samples")) cfg.detector.min_samples = to_uint("detector.min_samples", *v);
  if (auto v = take("detector.tvla_threshold"))
    cfg.detector.tvla_threshold = to_double("detector.tvla_threshold", *v);

  if (auto v = take("controller.th_low")) cfg.controller.th_low = to_double("controller.th_low", *v);
  if (auto v = take("controller.th_high")) cfg.controller.th_high = to_double("controller.th_high", *v);
  if (auto v = take("controller.sensor_acc_map")) {
    if (*v == "identity") cfg.controller.sensor_acc_map.reset();
    else cfg.controller.sensor_acc_map = to_uint_list("controller.sensor_acc_map", *v);
  }
  if (auto v = take("controller.acc_regions")) {
    if (*v == "nearest") {
      cfg.controller.acc_regions.reset();
    } else {
      std::vector<std::vector<std::uint32_t>> accs;
      for (auto part : split(*v, ';')) accs.push_back(to_uint_list("controller.acc_regions", part));
      cfg.controller.acc_regions = std::move(accs);
    }
  }

  if (auto v = take("countermeasure.regime")) {
    if (*v == "off") cfg.countermeasure.regime = Regime::off;
    else if (*v == "forced_on") cfg.countermeasure.regime = Regime::forced_on;
    else if (*v == "adaptive") cfg.countermeasure.regime = Regime::adaptive;
    else throw ConfigError("countermeasure.regime", "expected off|forced_on|adaptive");
  }
  if (auto v = take("countermeasure.calib_traces"))
    cfg.countermeasure.calib_traces = to_uint("countermeasure.calib_traces", *v);

  // Remaining countermeasure keys: base fields, then per-acc overrides.
  struct CmKey {
    std::string key;
    std::optional<std::uint32_t> acc;
    std::string field;
    std::string value;
  };
  std::vector<CmKey> cm_keys;
  for (auto it = kv.begin(); it != kv.end();) {
    const std::string& key = it->first;
    const std::string prefix = "countermeasure.";
    if (key.rfind(prefix, 0) != 0) {
      ++it;
      continue;
    }
    std::string_view rest(key);
    rest.remove_prefix(prefix.size());
    CmKey ck{key, std::nullopt, {}, it->second};
    if (rest.rfind("acc.", 0) == 0) {
      rest.remove_prefix(4);
      const auto dot = rest.find('.');
      if (dot == std::string_view::npos) throw ConfigError(key, "expected countermeasure.acc.<id>.<field>");
      ck.acc = to_bounded<std::uint32_t>(key, rest.substr(0, dot), 1u << 20);
      rest.remove_prefix(dot + 1);
    }
    ck.field = std::string(rest);
    cm_keys.push_back(std::move(ck));
    it = kv.erase(it);
  }
  std::stable_sort(cm_keys.begin(), cm_keys.end(), [](const CmKey& a, const CmKey& b) {
    if (a.acc.has_value() != b.acc.has_value()) return !a.acc.has_value();
    return cm_field_rank(a.field) < cm_field_rank(b.field);
  });
  for (const auto& ck : cm_keys) {
    ArmedCountermeasure* target = &cfg.countermeasure.base;
    if (ck.acc) {
      auto [it, inserted] = cfg.countermeasure.per_acc.try_emplace(*ck.acc, cfg.countermeasure.base);
      target = &it->second;
    }
    if (!apply_cm_key(*target, ck.key, ck.field, ck.value)) throw ConfigError(ck.key, "unknown key");
  }

  if (auto v = take("attack.enabled")) cfg.attack.enabled = to_bool("attack.enabled", *v);
  if (auto v = take("attack.sigma_attacker")) cfg.attack.sigma_attacker = to_double("attack.sigma_attacker", *v);
  if (auto v = take("attack.byte_index"))
    cfg.attack.byte_index = to_bounded<std::uint8_t>("attack.byte_index", *v, 255);
  if (auto v = take("attack.step")) cfg.attack.step = to_uint("attack.step", *v);
  if (auto v = take("attack.max_traces")) cfg.attack.max_traces = to_uint("attack.max_traces", *v);
  if (auto v = take("attack.capture_begin"))
    cfg.attack.capture_begin = to_bounded<std::uint32_t>("attack.capture_begin", *v, UINT32_MAX);
  if (auto v = take("attack.capture_end"))
    cfg.attack.capture_end = to_bounded<std::uint32_t>("attack.capture_end", *v, UINT32_MAX);
  if (auto v = take("attack.replications"))
    cfg.attack.replications = to_bounded<std::uint32_t>("attack.replications", *v, 1024);

  if (auto v = take("sweep.th_high")) cfg.sweep.th_high = to_double_list("sweep.th_high", *v);
  if (auto v = take("sweep.th_low")) cfg.sweep.th_low = to_double_list("sweep.th_low", *v);
  if (auto v = take("sweep.replications"))
    cfg.sweep.replications = to_bounded<std::uint32_t>("sweep.replications", *v, 1024);

  if (auto v = take("output.events")) cfg.output.events = to_bool("output.events", *v);
  if (auto v = take("output.scores")) cfg.output.scores = to_bool("output.scores", *v);
  if (auto v = take("output.readings")) cfg.output.readings = to_bool("output.readings", *v);
  if (auto v = take("output.region_traces")) cfg.output.region_traces = to_bool("output.region_traces", *v);
  if (auto v = take("output.max_export_traces"))
    cfg.output.max_export_traces = to_uint("output.max_export_traces", *v);

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  cfg.validate();
  return cfg;
}

std::vector<SensorPlacement> ExperimentConfig::sensor_placements() const {
  return place_sensors_even(floorplan.width, floorplan.height, sensors.n_sensors);
}

SensorAccMap ExperimentConfig::resolve_acc_map(const SensorArray& sensor_array) const {
  if (!controller.sensor_acc_map && !controller.acc_regions)
    return SensorAccMap::nearest(sensor_array, floorplan.region_count());
  SensorAccMap map;
  if (controller.sensor_acc_map) {
    map.acc_of_sensor = *controller.sensor_acc_map;
  } else {
    map.acc_of_sensor.resize(sensor_array.size());
    for (std::uint32_t s = 0; s < sensor_array.size(); ++s) map.acc_of_sensor[s] = s;
  }
  if (controller.acc_regions) {
    map.regions_of_acc = *controller.acc_regions;
  } else {
    std::uint32_t n_accs = 0;
    for (auto a : map.acc_of_sensor) n_accs = std::max(n_accs, a + 1);
    map.regions_of_acc.resize(n_accs);
    for (std::uint32_t r = 0; r < floorplan.region_count(); ++r) {
      const auto s = sensor_array.nearest_sensor(r);
      if (s < map.acc_of_sensor.size()) map.regions_of_acc[map.acc_of_sensor[s]].push_back(r);
    }
  }
  return map;
}

void ExperimentConfig::validate() const {
  if (n_traces < 1) throw ConfigError("n_traces", "must be >= 1");
  floorplan.validate();
  sensors.params.validate();
  if (!(sensors.kernel_scale > 0.0)) throw ConfigError("sensors.kernel_scale", "must be > 0");
  const auto placements = sensor_placements();
  leakage.validate();

  if (detector.kind.byte_index >= 16) throw ConfigError("detector.byte_index", "must be < 16");
  if (!(detector.score_scale > 0.0)) throw ConfigError("detector.score_scale", "must be > 0");
  if (!(detector.tvla_threshold > 0.0)) throw ConfigError("detector.tvla_threshold", "must be > 0");
  if (mode == Mode::run && detector.kind.type != DetectorKind::Type::nicv)
    throw ConfigError("detector.kind", "run mode needs the label-free nicv detector");

  try {
    HysteresisState probe(controller.th_low, controller.th_high);
  } catch (const InvalidThresholds&) {
    throw ConfigError("controller.th_high", "th_low must be < th_high, both >= 0");
  }
  SensorArray sensor_array(floorplan, placements, sensors.kernel_scale);
  const auto map = resolve_acc_map(sensor_array);
  map.validate(sensor_array.size(), floorplan.region_count());

  sclsim::validate(countermeasure.base.kind, "countermeasure");
  for (const auto& [acc, cm] : countermeasure.per_acc) {
    const std::string key = "countermeasure.acc." + std::to_string(acc);
    if (acc >= map.acc_count()) throw ConfigError(key, "acc does not exist");
    sclsim::validate(cm.kind, key);
  }

  if (attack.byte_index >= 16) throw ConfigError("attack.byte_index", "must be < 16");
  if (!(attack.sigma_attacker >= 0.0)) throw ConfigError("attack.sigma_attacker", "must be >= 0");
  if (attack.step < 1) throw ConfigError("attack.step", "must be >= 1");
  if (attack.capture_end <= attack.capture_begin || attack.capture_end > kEventsPerEncryption)
    throw ConfigError("attack.capture_end", "capture window must be non-empty and within " +
                                                std::to_string(kEventsPerEncryption) + " steps");
  if (attack.replications < 1) throw ConfigError("attack.replications", "must be >= 1");

  if (sweep.th_high.empty()) throw ConfigError("sweep.th_high", "empty list");
  if (sweep.th_low.empty()) throw ConfigError("sweep.th_low", "empty list");
  for (double hi : sweep.th_high)
    for (double lo : sweep.th_low) {
      try {
        HysteresisState probe(lo, hi);
      } catch (const InvalidThresholds&) {
        throw ConfigError("sweep.th_low", "pair (" + format_double(hi) + ", " + format_double(lo) +
                                              ") violates th_low < th_high");
      }
    }
  if (sweep.replications < 1) throw ConfigError("sweep.replications", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
}

KeyValues to_key_values(const ExperimentConfig& c) {
  KeyValues out;
  auto put = [&out](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };

  put("mode", std::string(to_string(c.mode)));
  put("seed", std::to_string(c.seed));
  put("n_traces", std::to_string(c.n_traces));
  put("key", to_hex(c.key));
  put("fixed_plaintext", to_hex(c.fixed_plaintext));

  put("floorplan.width", std::to_string(c.floorplan.width));
  put("floorplan.height", std::to_string(c.floorplan.height));
  {
    std::string regions;
    for (std::size_t i = 0; i < c.floorplan.regions.size(); ++i) {
      if (i) regions += ';';
      regions += std::to_string(c.floorplan.regions[i].x) + "," + std::to_string(c.floorplan.regions[i].y);
    }
    put("floorplan.regions", regions);
  }
  for (std::size_t k = 0; k < kOpKindCount; ++k)
    put("floorplan.op_map." + std::string(kOpKindNames[k]),
        join(std::vector<std::uint32_t>(c.floorplan.op_map[k].begin(), c.floorplan.op_map[k].end())));

  put("sensors.n_sensors", std::to_string(c.sensors.n_sensors));
  put("sensors.f0", format_double(c.sensors.params.f0));
  put("sensors.gamma", format_double(c.sensors.params.gamma));
  put("sensors.window", std::to_string(c.sensors.params.window));
  put("sensors.sigma_jitter", format_double(c.sensors.params.sigma_jitter));
  put("sensors.kernel_scale", format_double(c.sensors.kernel_scale));

  put("leakage.alpha", format_double(c.leakage.alpha));
  put("leakage.beta", format_double(c.leakage.beta));
  put("leakage.sigma_noise", format_double(c.leakage.sigma_noise));
  put("leakage.mode", c.leakage.mode == LeakageMode::hamming_weight ? "hamming_weight" : "hamming_distance");

  put("detector.kind", c.detector.kind.type == DetectorKind::Type::nicv ? "nicv" : "tvla_fixed_random");
  put("detector.byte_index", std::to_string(c.detector.kind.byte_index));
  put("detector.score_scale", format_double(c.detector.score_scale));
  put("detector.min_samples", std::to_string(c.detector.min_samples));
  put("detector.tvla_threshold", format_double(c.detector.tvla_threshold));

  put("controller.th_low", format_double(c.controller.th_low));
  put("controller.th_high", format_double(c.controller.th_high));
  put("controller.sensor_acc_map",
      c.controller.sensor_acc_map ? join(*c.controller.sensor_acc_map) : "identity");
  if (c.controller.acc_regions) {
    std::string s;
    for (std::size_t a = 0; a < c.controller.acc_regions->size(); ++a) {
      if (a) s += ';';
      s += join((*c.controller.acc_regions)[a]);
    }
    put("controller.acc_regions", s);
  } else {
    put("controller.acc_regions", "nearest");
  }

  put("countermeasure.regime", std::string(to_string(c.countermeasure.regime)));
  put("countermeasure.calib_traces", std::to_string(c.countermeasure.calib_traces));
  emit_cm(out, "countermeasure", c.countermeasure.base);
  for (const auto& [acc, cm] : c.countermeasure.per_acc)
    emit_cm(out, "countermeasure.acc." + std::to_string(acc), cm);

  put("attack.enabled", b(c.attack.enabled));
  put("attack.sigma_attacker", format_double(c.attack.sigma_attacker));
  put("attack.byte_index", std::to_string(c.attack.byte_index));
  put("attack.step", std::to_string(c.attack.step));
  put("attack.max_traces", std::to_string(c.attack.max_traces));
  put("attack.capture_begin", std::to_string(c.attack.capture_begin));
  put("attack.capture_end", std::to_string(c.attack.capture_end));
  put("attack.replications", std::to_string(c.attack.replications));

  put("sweep.th_high", join(c.sweep.th_high));
  put("sweep.th_low", join(c.sweep.th_low));
  put("sweep.replications", std::to_string(c.sweep.replications));

  put("output.events", b(c.output.events));
  put("output.scores", b(c.output.scores));
  put("output.readings", b(c.output.readings));
  put("output.region_traces", b(c.output.region_traces));
  put("output.max_export_traces", std::to_string(c.output.max_export_traces));
  return out;
}

}  // namespace sclsim
