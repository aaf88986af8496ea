#include "hrm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hrm {

namespace {

std::string num(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError("not a number: '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError("not an integer: '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError("not a boolean: '" + text + "'");
}

std::vector<double> to_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += num(xs[i]);
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define HRM_REAL(sec, name, member)                                              \
  Field {                                                                        \
    sec, name, [](const RunConfig& c) { return num(c.member); },                 \
        [](RunConfig& c, const std::string& v) { c.member = to_double(v); }      \
  }
#define HRM_INT(sec, name, member)                                                          \
  Field {                                                                                   \
    sec, name, [](const RunConfig& c) { return std::to_string(c.member); },                 \
        [](RunConfig& c, const std::string& v) {                                            \
          c.member = static_cast<decltype(c.member)>(to_integer(v));                        \
        }                                                                                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      HRM_INT("run", "seed", pipeline.seed),
      HRM_REAL("run", "duration_s", pipeline.duration_s),
      HRM_REAL("run", "sample_rate_hz", pipeline.sample_rate_hz),
      HRM_REAL("run", "settle_s", pipeline.settle_s),

      HRM_REAL("pulse", "bpm", pipeline.pulse.bpm),
      Field{"pulse", "shape",
            [](const RunConfig& c) {
              return std::string(c.pipeline.pulse.beat_shape.family == BeatFamily::kTwoLobe
                                     ? "two_lobe"
                                     : "raised_cosine");
            },
            [](RunConfig& c, const std::string& v) {
              const std::string t = trim(v);
              if (t == "two_lobe") {
                c.pipeline.pulse.beat_shape.family = BeatFamily::kTwoLobe;
              } else if (t == "raised_cosine") {
                c.pipeline.pulse.beat_shape.family = BeatFamily::kRaisedCosine;
              } else {
                throw ValidationError("expected two_lobe or raised_cosine");
              }
            }},
      HRM_REAL("pulse", "systolic_width_fraction", pipeline.pulse.beat_shape.systolic_width_fraction),
      HRM_REAL("pulse", "dicrotic_fraction", pipeline.pulse.beat_shape.dicrotic_fraction),
      HRM_REAL("pulse", "peak_to_peak_mv", pipeline.pulse.peak_to_peak_mv),
      HRM_REAL("pulse", "phase_s", pipeline.pulse.phase_s),

      HRM_REAL("optics", "emitted_power", pipeline.optics.emitted_power),
      HRM_REAL("optics", "attenuation_fraction", pipeline.optics.attenuation_fraction),
      Field{"optics", "modulation_depth",
            [](const RunConfig& c) {
              return c.pipeline.modulation_depth ? num(*c.pipeline.modulation_depth)
                                                 : std::string("auto");
            },
            [](RunConfig& c, const std::string& v) {
              if (trim(v) == "auto") {
                c.pipeline.modulation_depth.reset();
              } else {
                c.pipeline.modulation_depth = to_double(v);
              }
            }},

      HRM_REAL("divider", "supply_v", pipeline.divider.supply_v),
      HRM_REAL("divider", "fixed_resistance_ohm", pipeline.divider.fixed_resistance_ohm),
      HRM_REAL("divider", "r_dark_ohm", pipeline.divider.r_dark_ohm),
      HRM_REAL("divider", "r_bright_ohm", pipeline.divider.r_bright_ohm),
      HRM_REAL("divider", "power_scale", pipeline.divider.power_scale),
      HRM_REAL("divider", "gamma", pipeline.divider.gamma),

      Field{"noise", "enabled",
            [](const RunConfig& c) { return std::string(c.pipeline.noise_enabled ? "true" : "false"); },
            [](RunConfig& c, const std::string& v) { c.pipeline.noise_enabled = to_bool(v); }},
      HRM_REAL("noise", "mains_hz", pipeline.noise.mains_hz),
      HRM_REAL("noise", "mains_amplitude_v", pipeline.noise.mains_amplitude_v),
      HRM_REAL("noise", "ambient_flicker_hz", pipeline.noise.ambient_flicker_hz),
      HRM_REAL("noise", "ambient_amplitude_v", pipeline.noise.ambient_amplitude_v),
      HRM_REAL("noise", "dc_offset_v", pipeline.noise.dc_offset_v),
      HRM_REAL("noise", "drift_amplitude_v", pipeline.noise.drift.amplitude_v),
      HRM_REAL("noise", "drift_frequency_hz", pipeline.noise.drift.frequency_hz),
      HRM_REAL("noise", "white_noise_std_v", pipeline.noise.white_noise_std_v),
      Field{"noise", "target_snr_db",
            [](const RunConfig& c) {
              return c.pipeline.noise.target_snr_db ? num(*c.pipeline.noise.target_snr_db)
                                                    : std::string("none");
            },
            [](RunConfig& c, const std::string& v) {
              if (trim(v) == "none") {
                c.pipeline.noise.target_snr_db.reset();
              } else {
                c.pipeline.noise.target_snr_db = to_double(v);
              }
            }},

      HRM_REAL("filter", "low_cutoff_hz", pipeline.filter.low_cutoff_hz),
      HRM_REAL("filter", "high_cutoff_hz", pipeline.filter.high_cutoff_hz),
      HRM_INT("filter", "order_per_edge", pipeline.filter.order_per_edge),
      Field{"filter", "design_family", [](const RunConfig&) { return std::string("butterworth"); },
            [](RunConfig&, const std::string& v) {
              if (trim(v) != "butterworth") throw ValidationError("only butterworth is supported");
            }},

      HRM_REAL("amplifier", "gain_db", pipeline.amplifier.gain_db),
      HRM_REAL("amplifier", "offset_v", pipeline.amplifier.offset_v),
      HRM_REAL("amplifier", "rail_low_v", pipeline.amplifier.rail_low_v),
      HRM_REAL("amplifier", "rail_high_v", pipeline.amplifier.rail_high_v),

      HRM_REAL("detector", "threshold_v", pipeline.detector.threshold_v),
      HRM_REAL("detector", "hysteresis_v", pipeline.detector.hysteresis_v),
      HRM_REAL("detector", "refractory_s", pipeline.detector.refractory_s),
      Field{"detector", "mode",
            [](const RunConfig& c) { return std::string(to_string(c.pipeline.detector.mode)); },
            [](RunConfig& c, const std::string& v) {
              c.pipeline.detector.mode = parse_detection_mode(trim(v));
            }},
      HRM_INT("detector", "window_s", pipeline.detector.window_s),
      HRM_INT("detector", "pulses_to_average", pipeline.detector.pulses_to_average),
      HRM_REAL("detector", "min_bpm", pipeline.detector.min_bpm),
      HRM_REAL("detector", "max_bpm", pipeline.detector.max_bpm),
      HRM_REAL("detector", "rail_low_v", pipeline.detector.rail_low_v),
      HRM_REAL("detector", "rail_high_v", pipeline.detector.rail_high_v),

      Field{"eval", "denominator",
            [](const RunConfig& c) { return std::string(to_string(c.eval.denominator)); },
            [](RunConfig& c, const std::string& v) { c.eval.denominator = parse_denominator(trim(v)); }},
      Field{"eval", "sweep", [](const RunConfig& c) { return join(c.eval.sweep_bpms); },
            [](RunConfig& c, const std::string& v) { c.eval.sweep_bpms = to_list(v); }},
  };
  return table;
}

#undef HRM_REAL
#undef HRM_INT

Biquad parse_section(const std::string& text) {
  std::stringstream ss(text);
  double v[5];
  for (double& x : v) {
    std::string tok;
    if (!(ss >> tok)) throw ValidationError("expected five coefficients b0 b1 b2 a1 a2");
    x = to_double(tok);
  }
  std::string extra;
  if (ss >> extra) throw ValidationError("expected five coefficients b0 b1 b2 a1 a2");
  return {v[0], v[1], v[2], v[3], v[4]};
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  std::vector<std::pair<std::size_t, Biquad>> sections;
  std::optional<double> coefficient_rate;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ValidationError("config key '" + section + "' must live inside a section");
    }
    for (const auto& [key, node] : body) {
      const std::string where = section + "." + key;
      const std::string value = node.get_value<std::string>();
      try {
        if (section == "coefficients") {
          if (key == "sample_rate_hz") {
            coefficient_rate = to_double(value);
          } else if (key.rfind("section", 0) == 0) {
            const auto index = static_cast<std::size_t>(to_integer(key.substr(7)));
            sections.emplace_back(index, parse_section(value));
          } else {
            throw ValidationError("unknown key");
          }
          continue;
        }
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
          return section == f.section && key == f.key;
        });
        if (it == table.end()) throw ValidationError("unknown key");
        it->set(cfg, value);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }

  if (!sections.empty()) {
    std::sort(sections.begin(), sections.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FilterCoefficients c;
    c.sample_rate_hz = coefficient_rate.value_or(cfg.pipeline.sample_rate_hz);
    for (std::size_t i = 0; i < sections.size(); ++i) {
      if (sections[i].first != i) throw ValidationError("coefficients: sections must be numbered from 0");
      c.sections.push_back(sections[i].second);
    }
    cfg.pipeline.coefficients = std::move(c);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_run_config(in);
}

void write_run_config(std::ostream& out, const RunConfig& cfg, bool include_coefficients) {
  const char* current = nullptr;
  for (const Field& f : fields()) {
    if (current == nullptr || std::string_view(current) != f.section) {
      if (current != nullptr) out << '\n';
      out << '[' << f.section << "]\n";
      current = f.section;
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  if (include_coefficients) {
    const FilterCoefficients c = cfg.pipeline.filter_coefficients();
    out << "\n[coefficients]\nsample_rate_hz = " << num(c.sample_rate_hz) << '\n';
    for (std::size_t i = 0; i < c.sections.size(); ++i) {
      const Biquad& s = c.sections[i];
      out << "section" << i << " = " << num(s.b0) << ' ' << num(s.b1) << ' ' << num(s.b2) << ' '
          << num(s.a1) << ' ' << num(s.a2) << '\n';
    }
  }
}

}  // namespace hrm
