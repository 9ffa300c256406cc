#include "qrc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace qrc {

ConfigError::ConfigError(const std::string& msg, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
      line_(line) {}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

std::vector<double> SweepAxes::detuning_grid() const {
  return linspace(delta_min, delta_max, delta_steps);
}

std::vector<double> SweepAxes::amplitude_grid() const {
  return linspace(amp_min, amp_max, amp_steps);
}

ExperimentConfig::ExperimentConfig() {
  for (double k : {0.0, -0.1, -0.3, -1.0, -3.0}) sweep.k_cc.push_back(mhz_to_rad_per_us(k));
  for (int d = 0; d <= 60; ++d) sweep.delays.push_back(d);
}

void ExperimentConfig::validate() const {
  try {
    physical.validate();
    measurement.validate(physical.n_fock);
    encoding.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(task.n_periods >= 2, "task.n_periods: requires n_periods >= 2");
  require(task.train_fraction > 0 && task.train_fraction < 1,
          "task.train_fraction: requires 0 < train_fraction < 1");
  require(task.pulse_duration > 0, "task.pulse_ns: requires pulse_ns > 0");
  require(!task.sample_offsets.empty(), "task.sample_times_ns: requires at least one time");
  for (std::size_t i = 0; i < task.sample_offsets.size(); ++i) {
    require(task.sample_offsets[i] > 0 && task.sample_offsets[i] <= task.pulse_duration * (1 + 1e-12),
            "task.sample_times_ns: times must lie in (0, pulse_ns]");
    require(i == 0 || task.sample_offsets[i] > task.sample_offsets[i - 1],
            "task.sample_times_ns: times must be increasing");
  }
  require(task.select_k >= 1, "task.select_k: requires select_k >= 1");
  require(task.population_steps >= 2, "task.population_steps: requires >= 2");
  require(task.mg_points >= 2 * task.mg_history + 4, "task.mg_points: too few points for mg_history");
  require(task.mg_history >= 1, "task.mg_history: requires >= 1");
  require(task.mg_pulse > 0, "task.mg_pulse_ns: requires > 0");
  require(task.kerr_drive > 0, "task.kerr_drive_ns: requires > 0");
  require(sweep.delta_steps >= 1, "sweep.delta_steps: requires >= 1");
  require(sweep.amp_steps >= 2, "sweep.amp_steps: requires >= 2");
  require(sweep.amp_max > sweep.amp_min && sweep.amp_min >= 0,
          "sweep.amp_max: requires amp_max > amp_min >= 0");
  require(sweep.seeds >= 1, "sweep.seeds: requires >= 1");
  for (int n : sweep.n_states)
    require(n >= 1 && n <= physical.n_fock, "sweep.n_states: entries must lie in [1, n_fock]");
  for (int t : sweep.time_counts)
    require(t >= 1 && t <= static_cast<int>(task.sample_offsets.size()),
            "sweep.time_counts: entries must lie in [1, number of sample times]");
  for (int s : sweep.shots) require(s >= 0, "sweep.shots: entries must be >= 0");
  for (auto [lo, hi] : sweep.ranges) require(hi > lo && lo >= 0, "sweep.ranges: requires 0 <= min < max");
  for (double k : sweep.kappa_phi) require(k >= 0, "sweep.kappa_phi: entries must be >= 0");
  for (int n : sweep.n_targets) require(n >= 1 && n <= 3, "sweep.n_targets: entries must be 1, 2 or 3");
  for (int d : sweep.delays) require(d >= 0, "sweep.delays: entries must be >= 0");
  for (double t : sweep.mg_taus) require(t > 0, "sweep.mg_taus: entries must be > 0");
  require(dt > 0, "run.dt_ns: requires dt_ns > 0");
  require(max_fock >= physical.n_fock, "run.max_fock: requires max_fock >= physical.n_fock");
}

// ---------------------------------------------------------------------------
// Value formatting and parsing

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// Shortest decimal d such that parse(d) * scale reproduces `v` exactly.
std::string fmt_scaled(double v, double scale) {
  const double shown = v / scale;
  for (int digits = 1; digits <= 17; ++digits) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, shown, std::chars_format::general, digits);
    std::string s(buf, p);
    if (std::stod(s) * scale == v) return s;
  }
  return fmt(shown);
}

double parse_double(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + t + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + t + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

/// Integer list; "a:b" expands to the inclusive range.
std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(static_cast<int>(parse_int(item, key)));
      continue;
    }
    const auto lo = parse_int(item.substr(0, colon), key);
    const auto hi = parse_int(item.substr(colon + 1), key);
    if (hi < lo) throw ConfigError(key + ": empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key, double scale) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item, key) * scale);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

std::string join_doubles(const std::vector<double>& v, double scale) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_scaled(v[i], scale);
  return out;
}

struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

constexpr double kMHz = kTwoPi;  // MHz -> rad/us
constexpr double kNs = 1e-3;     // ns -> us

// Helpers building KeySpec entries for common field kinds.
template <typename Access>
KeySpec real_key(std::string name, double scale, Access access) {
  return {std::move(name),
          [=](ExperimentConfig& c, const std::string& v, const std::string& k) {
            access(c) = parse_double(v, k) * scale;
          },
          [=](const ExperimentConfig& c) {
            return fmt_scaled(access(const_cast<ExperimentConfig&>(c)), scale);
          }};
}

template <typename Access>
KeySpec int_key(std::string name, Access access) {
  return {std::move(name),
          [=](ExperimentConfig& c, const std::string& v, const std::string& k) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_int(v, k));
          },
          [=](const ExperimentConfig& c) {
            return std::to_string(access(const_cast<ExperimentConfig&>(c)));
          }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    // [physical]
    t.push_back(int_key("physical.n_fock", [](ExperimentConfig& c) -> int& { return c.physical.n_fock; }));
    t.push_back({"physical.include_qubit",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                   c.physical.include_qubit = parse_bool(v, k);
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.physical.include_qubit ? "true" : "false");
                 }});
    t.push_back(real_key("physical.delta_c", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.delta_c; }));
    t.push_back(real_key("physical.delta_q", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.delta_q; }));
    t.push_back(real_key("physical.chi", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.chi; }));
    t.push_back(real_key("physical.k_cc", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.k_cc; }));
    t.push_back(real_key("physical.k_cq", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.k_cq; }));
    t.push_back(real_key("physical.kappa_ext", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.kappa_ext; }));
    t.push_back(real_key("physical.kappa_int", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.kappa_int; }));
    t.push_back(real_key("physical.t1_qubit", 1.0, [](ExperimentConfig& c) -> double& { return c.physical.t1_qubit; }));
    t.push_back(real_key("physical.kappa_phi", kMHz, [](ExperimentConfig& c) -> double& { return c.physical.kappa_phi; }));
    // [measurement]
    t.push_back(int_key("measurement.n_states", [](ExperimentConfig& c) -> int& { return c.measurement.n_states; }));
    t.push_back(int_key("measurement.shots", [](ExperimentConfig& c) -> int& { return c.measurement.shots; }));
    t.push_back(real_key("measurement.distortion_a", 1.0, [](ExperimentConfig& c) -> double& { return c.measurement.distortion_a; }));
    t.push_back(real_key("measurement.distortion_b", 1.0, [](ExperimentConfig& c) -> double& { return c.measurement.distortion_b; }));
    // [encoding]
    t.push_back(real_key("encoding.alpha_min", 1.0, [](ExperimentConfig& c) -> double& { return c.encoding.alpha_min; }));
    t.push_back(real_key("encoding.alpha_max", 1.0, [](ExperimentConfig& c) -> double& { return c.encoding.alpha_max; }));
    // [task]
    t.push_back(int_key("task.n_periods", [](ExperimentConfig& c) -> int& { return c.task.n_periods; }));
    t.push_back(real_key("task.train_fraction", 1.0, [](ExperimentConfig& c) -> double& { return c.task.train_fraction; }));
    t.push_back(real_key("task.pulse_ns", kNs, [](ExperimentConfig& c) -> double& { return c.task.pulse_duration; }));
    t.push_back({"task.sample_times_ns",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                   c.task.sample_offsets = parse_double_list(v, k, kNs);
                 },
                 [](const ExperimentConfig& c) { return join_doubles(c.task.sample_offsets, kNs); }});
    t.push_back(int_key("task.select_k", [](ExperimentConfig& c) -> int& { return c.task.select_k; }));
    t.push_back(real_key("task.population_amp_max", 1.0, [](ExperimentConfig& c) -> double& { return c.task.population_amp_max; }));
    t.push_back(int_key("task.population_steps", [](ExperimentConfig& c) -> int& { return c.task.population_steps; }));
    t.push_back(int_key("task.mg_points", [](ExperimentConfig& c) -> int& { return c.task.mg_points; }));
    t.push_back(real_key("task.mg_tau", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.tau; }));
    t.push_back(real_key("task.mg_beta", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.beta; }));
    t.push_back(real_key("task.mg_gamma", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.gamma; }));
    t.push_back(real_key("task.mg_exponent", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.exponent; }));
    t.push_back(real_key("task.mg_initial", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.initial_value; }));
    t.push_back(real_key("task.mg_dt", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.dt_internal; }));
    t.push_back(real_key("task.mg_stride", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.sample_stride; }));
    t.push_back(real_key("task.mg_burn_in", 1.0, [](ExperimentConfig& c) -> double& { return c.task.mg.burn_in; }));
    t.push_back(int_key("task.mg_history", [](ExperimentConfig& c) -> int& { return c.task.mg_history; }));
    t.push_back(real_key("task.mg_pulse_ns", kNs, [](ExperimentConfig& c) -> double& { return c.task.mg_pulse; }));
    t.push_back(real_key("task.kerr_drive_ns", kNs, [](ExperimentConfig& c) -> double& { return c.task.kerr_drive; }));
    // [sweep]
    t.push_back({"sweep.n_states",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.n_states = parse_int_list(v, k); },
                 [](const ExperimentConfig& c) { return join_ints(c.sweep.n_states); }});
    t.push_back({"sweep.time_counts",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.time_counts = parse_int_list(v, k); },
                 [](const ExperimentConfig& c) { return join_ints(c.sweep.time_counts); }});
    t.push_back({"sweep.shots",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.shots = parse_int_list(v, k); },
                 [](const ExperimentConfig& c) { return join_ints(c.sweep.shots); }});
    t.push_back({"sweep.ranges",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                   c.sweep.ranges.clear();
                   for (const auto& item : split(v, ',')) {
                     const auto colon = item.find(':');
                     if (colon == std::string::npos) throw ConfigError(k + ": expected min:max pairs, got '" + item + "'");
                     c.sweep.ranges.emplace_back(parse_double(item.substr(0, colon), k),
                                                 parse_double(item.substr(colon + 1), k));
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.sweep.ranges.size(); ++i)
                     out += (i ? ", " : "") + fmt(c.sweep.ranges[i].first) + ":" + fmt(c.sweep.ranges[i].second);
                   return out;
                 }});
    t.push_back({"sweep.kappa_phi",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.kappa_phi = parse_double_list(v, k, kMHz); },
                 [](const ExperimentConfig& c) { return join_doubles(c.sweep.kappa_phi, kMHz); }});
    t.push_back({"sweep.k_cc",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.k_cc = parse_double_list(v, k, kMHz); },
                 [](const ExperimentConfig& c) { return join_doubles(c.sweep.k_cc, kMHz); }});
    t.push_back(real_key("sweep.delta_min", kMHz, [](ExperimentConfig& c) -> double& { return c.sweep.delta_min; }));
    t.push_back(real_key("sweep.delta_max", kMHz, [](ExperimentConfig& c) -> double& { return c.sweep.delta_max; }));
    t.push_back(int_key("sweep.delta_steps", [](ExperimentConfig& c) -> int& { return c.sweep.delta_steps; }));
    t.push_back(real_key("sweep.amp_min", 1.0, [](ExperimentConfig& c) -> double& { return c.sweep.amp_min; }));
    t.push_back(real_key("sweep.amp_max", 1.0, [](ExperimentConfig& c) -> double& { return c.sweep.amp_max; }));
    t.push_back(int_key("sweep.amp_steps", [](ExperimentConfig& c) -> int& { return c.sweep.amp_steps; }));
    t.push_back({"sweep.n_targets",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.n_targets = parse_int_list(v, k); },
                 [](const ExperimentConfig& c) { return join_ints(c.sweep.n_targets); }});
    t.push_back({"sweep.delays",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.delays = parse_int_list(v, k); },
                 [](const ExperimentConfig& c) { return join_ints(c.sweep.delays); }});
    t.push_back({"sweep.mg_taus",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.sweep.mg_taus = parse_double_list(v, k, 1.0); },
                 [](const ExperimentConfig& c) { return join_doubles(c.sweep.mg_taus, 1.0); }});
    t.push_back(int_key("sweep.seeds", [](ExperimentConfig& c) -> int& { return c.sweep.seeds; }));
    // [run]
    t.push_back({"run.seed",
                 [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                   const auto s = parse_int(v, k);
                   if (s < 0) throw ConfigError(k + ": seed must be non-negative");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    t.push_back(real_key("run.dt_ns", kNs, [](ExperimentConfig& c) -> double& { return c.dt; }));
    t.push_back(int_key("run.max_fock", [](ExperimentConfig& c) -> int& { return c.max_fock; }));
    return t;
  }();
  return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

const KeySpec& lookup(const std::string& key, int line) {
  const auto& table = key_table();
  for (const auto& spec : table)
    if (spec.name == key) return spec;
  const KeySpec* best = &table.front();
  std::size_t best_d = std::string::npos;
  for (const auto& spec : table) {
    const auto d = edit_distance(key, spec.name);
    if (d < best_d) {
      best_d = d;
      best = &spec;
    }
  }
  throw ConfigError("unknown key '" + key + "' (did you mean '" + best->name + "'?)", line);
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
  const auto& spec = lookup(key, line);
  try {
    spec.set(cfg, value, key);
  } catch (const ConfigError& e) {
    if (line > 0 && e.line() == 0) throw ConfigError(e.what(), line);
    throw;
  }
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& s : key_table()) out.push_back(s.name);
  return out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("malformed section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError("key '" + key + "' outside of any [section]", line_no);
      key = section + "." + key;
    }
    apply(cfg, key, line.substr(eq + 1), line_no);
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + ov + "' is not of the form key=value");
    apply(cfg, trim(ov.substr(0, eq)), ov.substr(eq + 1), 0);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  if (path.empty()) return parse_config_text("", overrides);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& spec : key_table()) {
    const auto dot = spec.name.find('.');
    const std::string sec = spec.name.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + ("[" + sec + "]\n");
      section = sec;
    }
    out += spec.name.substr(dot + 1) + " = " + spec.get(cfg) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_config_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  return os.str();
}

}  // namespace qrc
