#include "hilsim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hilsim::config {

namespace detail {
struct PresetBlob {
  const char* name;
  const char* text;
};
extern const PresetBlob kPresets[];
extern const std::size_t kPresetCount;
}  // namespace detail

namespace {

using Schema = std::map<std::string, std::set<std::string>>;

const Schema& schema() {
  static const Schema s = {
      {"coil", {"side_mm", "spacing_mm", "turns", "current_a"}},
      {"grid",
       {"x_min_mm", "x_max_mm", "nx", "y_min_mm", "y_max_mm", "ny", "z_min_mm", "z_max_mm", "nz", "uniformity"}},
      {"optimize", {"side_mm", "resolution_mm", "thresholds_pct", "profile_max_over_d", "profile_points"}},
      {"plant", {"fit_k_ut_per_v", "fit_b_ut", "fit_k_desc_ut_per_v", "fit_b_desc_ut", "v_min_v", "v_max_v"}},
      {"sensor", {"model", "noise_nt", "quant_step_nt", "rate_hz"}},
      {"disturbance", {"dc_nt", "gauss_sigma_nt", "ac_components", "seed"}},
      {"profile", {"kind", "from_nt", "to_nt", "switch_s", "ramp_s", "file"}},
      {"sysid",
       {"snr_db", "order", "iterations", "reinjection_at", "reinjection_len", "reinjection_gain", "true_weights",
        "initial_weights", "trials", "smooth_window", "tail_fraction", "converge_factor"}},
      {"step",
       {"duration_s", "settle_s", "band_fraction", "dwell_s", "full_scale_nt", "error_scale_nt", "input_gain"}},
      {"lms", {"mu"}},
      {"svs", {"alpha", "beta"}},
      {"atlms", {"alpha", "beta", "m", "n_scale"}},
      {"convex", {"alpha", "beta", "sigma", "phi", "c", "mu_b", "gamma_o", "t_o", "fit_k", "fit_b", "b_max"}},
      {"check", {"samples", "beta_scale", "c_scale"}},
      {"run", {"seed", "methods", "threads"}},
      {"location", {"north_nt", "east_nt", "up_nt"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& source, int line) { return source + ":" + std::to_string(line) + ": "; }

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e && std::isfinite(out);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineNo = 0;
  bool sawVersion = false;
  while (std::getline(in, raw)) {
    ++lineNo;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where(source, lineNo) + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError(where(source, lineNo) + "unknown section [" + section + "]");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where(source, lineNo) + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(source, lineNo) + "missing key before '='");
    if (section.empty()) {
      if (key != "schema_version")
        throw ConfigError(where(source, lineNo) + "unknown top-level key '" + key + "' (only schema_version)");
      double v = 0;
      if (!parse_double(value, v) || v != std::floor(v))
        throw ConfigError(where(source, lineNo) + "schema_version must be an integer");
      if (static_cast<int>(v) != kSchemaVersion)
        throw ConfigError(where(source, lineNo) + "unsupported schema_version " + value + " (this build reads " +
                          std::to_string(kSchemaVersion) + ")");
      cfg.schemaVersion_ = static_cast<int>(v);
      sawVersion = true;
      continue;
    }
    if (!schema().at(section).count(key))
      throw ConfigError(where(source, lineNo) + "unknown key '" + key + "' in section [" + section + "]");
    auto& slot = cfg.sections_[section];
    if (slot.count(key)) throw ConfigError(where(source, lineNo) + "duplicate key '" + key + "'");
    slot[key] = Entry{value, source, lineNo};
  }
  if (!sawVersion) throw ConfigError(source + ": missing schema_version");
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::merge(const Config& other) {
  for (const auto& [sec, entries] : other.sections_) {
    auto& dst = sections_[sec];
    for (const auto& [k, e] : entries) dst[k] = e;
  }
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!schema().count(section) || !schema().at(section).count(key))
    throw ConfigError("override: unknown key '" + section + "." + key + "'");
  sections_[section][key] = Entry{value, "command line", 0};
}

const Entry* Config::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void Config::fail(const Entry& e, const std::string& key, const std::string& what) const {
  throw ConfigError(where(e.source, e.line) + "key '" + key + "': " + what + " (got '" + e.value + "')");
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0;
  if (!parse_double(e->value, v)) fail(*e, key, "expected a finite number");
  return v;
}

long Config::get_long(const std::string& section, const std::string& key, long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  long v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto res = std::from_chars(b, end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(*e, key, "expected an integer");
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto res = std::from_chars(b, end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(*e, key, "expected a non-negative integer");
  return v;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) {
    double v = 0;
    if (!parse_double(item, v)) fail(*e, key, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& section, const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const Entry* e = find(section, key);
  return e ? split_list(e->value) : fallback;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) out.emplace_back(detail::kPresets[i].name);
  return out;
}

std::optional<std::string> preset_text(const std::string& name) {
  for (std::size_t i = 0; i < detail::kPresetCount; ++i)
    if (name == detail::kPresets[i].name) return std::string(detail::kPresets[i].text);
  return std::nullopt;
}

Config load_preset(const std::string& name) {
  auto text = preset_text(name);
  if (!text) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return Config::parse(*text, "preset " + name);
}

}  // namespace hilsim::config
