#include "hrm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hrm/config.hpp"
#include "hrm/io.hpp"
#include "hrm/report.hpp"

namespace hrm {

namespace {

namespace fs = std::filesystem;

// Options shared by several subcommands. Only options given on the command
// line override the run-config document.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> bpm, duration, rate, p2p_mv, snr_db;
  std::optional<std::string> shape;
  bool no_noise = false;
  std::optional<double> low, high;
  std::optional<int> order;
  std::optional<double> gain_db, offset;
  std::optional<std::string> mode;
  std::optional<int> window, pulses;
  std::optional<double> threshold, hysteresis;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Run-config document (default: $HRM_CONFIG)");
  cmd->add_option("--seed", o.seed, "Noise seed");
}

void add_pulse_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--bpm", o.bpm, "Heart rate of the synthetic beat train");
  cmd->add_option("--duration", o.duration, "Duration in seconds");
  cmd->add_option("--rate", o.rate, "Sample rate in Hz");
  cmd->add_option("--p2p-mv", o.p2p_mv, "Sensor swing in millivolts");
  cmd->add_option("--shape", o.shape, "two_lobe | raised_cosine");
  cmd->add_option("--snr-db", o.snr_db, "Target input SNR in dB");
  cmd->add_flag("--no-noise", o.no_noise, "Disable noise injection");
}

void add_filter_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--low", o.low, "DC-blocking corner in Hz");
  cmd->add_option("--high", o.high, "Upper cutoff in Hz");
  cmd->add_option("--order", o.order, "Butterworth order per edge");
}

void add_amplifier_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--gain-db", o.gain_db, "Amplifier gain in dB");
  cmd->add_option("--offset", o.offset, "Output offset in volts");
}

void add_detector_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mode", o.mode, "interval | window");
  cmd->add_option("--window", o.window, "Counting window in seconds (5 or 10)");
  cmd->add_option("--pulses", o.pulses, "Intervals to average");
  cmd->add_option("--threshold", o.threshold, "Edge threshold in volts");
  cmd->add_option("--hysteresis", o.hysteresis, "Re-arm hysteresis in volts");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg;
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("HRM_CONFIG"); env != nullptr) path = env;
  }
  if (!path.empty()) cfg = load_run_config(path);

  PipelineConfig& p = cfg.pipeline;
  if (o.seed) p.seed = *o.seed;
  if (o.bpm) p.pulse.bpm = *o.bpm;
  if (o.duration) p.duration_s = *o.duration;
  if (o.rate) {
    p.sample_rate_hz = *o.rate;
    if (p.coefficients) p.coefficients->sample_rate_hz = *o.rate;
  }
  if (o.p2p_mv) p.pulse.peak_to_peak_mv = *o.p2p_mv;
  if (o.shape) {
    if (*o.shape == "two_lobe") {
      p.pulse.beat_shape.family = BeatFamily::kTwoLobe;
    } else if (*o.shape == "raised_cosine") {
      p.pulse.beat_shape.family = BeatFamily::kRaisedCosine;
    } else {
      throw ValidationError("--shape: expected two_lobe or raised_cosine");
    }
  }
  if (o.snr_db) {
    p.noise.target_snr_db = *o.snr_db;
    p.noise_enabled = true;
  }
  if (o.no_noise) p.noise_enabled = false;
  if (o.low || o.high || o.order) p.coefficients.reset();
  if (o.low) p.filter.low_cutoff_hz = *o.low;
  if (o.high) p.filter.high_cutoff_hz = *o.high;
  if (o.order) p.filter.order_per_edge = *o.order;
  if (o.gain_db) p.amplifier.gain_db = *o.gain_db;
  if (o.offset) p.amplifier.offset_v = *o.offset;
  if (o.mode) p.detector.mode = parse_detection_mode(*o.mode);
  if (o.window) p.detector.window_s = *o.window;
  if (o.pulses) p.detector.pulses_to_average = *o.pulses;
  if (o.threshold) p.detector.threshold_v = *o.threshold;
  if (o.hysteresis) p.detector.hysteresis_v = *o.hysteresis;
  return cfg;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << text;
  if (!file) throw IoError("write to " + path + " failed");
}

void write_signal(const std::string& path, const SampledSignal& signal, std::ostream& out) {
  if (path.empty() || path == "-") {
    write_signal_csv(out, signal);
  } else {
    write_signal_csv(fs::path(path), signal);
  }
}

SampledSignal read_signal(const std::string& path) {
  if (path.empty()) throw ValidationError("--in is required");
  return read_signal_csv(fs::path(path));
}

std::vector<double> parse_frequency_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--freqs: cannot parse '" + item + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ValidationError("--freqs: expected start:stop:step with step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> freqs(count);
  for (std::size_t i = 0; i < count; ++i) freqs[i] = parts[0] + static_cast<double>(i) * parts[2];
  return freqs;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json table1_json(Denominator d) {
  const ReferenceDataset& table = reference_table("table1");
  EvaluationReport report;
  std::vector<double> errors;
  nlohmann::json printed = nlohmann::json::array();
  for (const ReferenceRow& row : table.rows) {
    report.pairs.push_back(*row.pair);
    errors.push_back(error_rate(*row.pair, d));
    printed.push_back(row.printed_error_pct);
  }
  report.errors = summarize(errors);
  nlohmann::json j = to_json(report);
  j["table"] = table.name;
  j["denominator"] = std::string(to_string(d));
  j["printed_error_pct"] = printed;

  nlohmann::json reconciliation;
  for (Denominator alt : {Denominator::kActual, Denominator::kMeasured}) {
    std::vector<double> e;
    for (const ReferenceRow& row : table.rows) e.push_back(error_rate(*row.pair, alt));
    const ErrorReport r = summarize(e);
    double worst = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      worst = std::max(worst, std::abs(e[i] - table.rows[i].printed_error_pct));
    }
    reconciliation[std::string(to_string(alt))] = {
        {"mean_pct", r.mean_pct}, {"std_pct", r.std_pct}, {"max_row_deviation_pct", worst}};
  }
  j["reconciliation"] = reconciliation;
  return j;
}

std::string table1_text(const nlohmann::json& j) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%6s %6s %12s %12s\n", "ECG", "HRM", "printed_pct", "computed_pct");
  out << line;
  for (std::size_t i = 0; i < j["pairs"].size(); ++i) {
    std::snprintf(line, sizeof(line), "%6.0f %6.0f %12.2f %12.4f\n",
                  j["pairs"][i]["actual_bpm"].get<double>(), j["pairs"][i]["measured_bpm"].get<double>(),
                  j["printed_error_pct"][i].get<double>(), j["errors_pct"][i].get<double>());
    out << line;
  }
  std::snprintf(line, sizeof(line), "denominator %s: mean = %.4f  std = %.4f (population)\n",
                j["denominator"].get<std::string>().c_str(), j["mean_pct"].get<double>(),
                j["std_pct"].get<double>());
  out << line;
  for (const char* d : {"actual", "measured"}) {
    const auto& r = j["reconciliation"][d];
    std::snprintf(line, sizeof(line),
                  "  with denominator %-8s mean %.4f std %.4f, max deviation from printed column %.4f\n", d,
                  r["mean_pct"].get<double>(), r["std_pct"].get<double>(),
                  r["max_row_deviation_pct"].get<double>());
    out << line;
  }
  return out.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fingertip heart-rate measurement chain: synthesis, filtering, detection, evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Overrides o;
  std::string in_path;
  std::string out_path;
  std::string dump_dir;
  std::string freqs = "0.1:200:0.1";
  std::string table_name;
  std::string denominator;
  std::string sweep;
  std::string write_config;
  bool table1 = false;
  bool as_json = false;
  bool as_text = false;
  bool report_snr = false;

  auto* synth = app.add_subcommand("synth", "Synthesize the sensor voltage (with noise unless --no-noise)");
  add_config_options(synth, o);
  add_pulse_options(synth, o);
  synth->add_option("--out,-o", out_path, "Signal CSV output (default stdout)");

  auto* filter = app.add_subcommand("filter", "Band-pass filter a signal CSV");
  add_config_options(filter, o);
  add_filter_options(filter, o);
  filter->add_option("--in,-i", in_path, "Signal CSV input")->required();
  filter->add_option("--out,-o", out_path, "Signal CSV output (default stdout)");

  auto* amp = app.add_subcommand("amplify", "Amplify with offset and rail clipping");
  add_config_options(amp, o);
  add_amplifier_options(amp, o);
  amp->add_option("--in,-i", in_path, "Signal CSV input")->required();
  amp->add_option("--out,-o", out_path, "Signal CSV output (default stdout)");

  auto* detect = app.add_subcommand("detect", "Detect pulses and compute the heart rate");
  add_config_options(detect, o);
  add_detector_options(detect, o);
  detect->add_option("--in,-i", in_path, "Amplified signal CSV input")->required();
  detect->add_option("--out,-o", out_path, "DetectionResult JSON output (default stdout)");
  detect->add_flag("--text", as_text, "Write a key/value report instead of JSON");

  auto* response = app.add_subcommand("response", "Dump the band-pass magnitude response");
  add_config_options(response, o);
  add_filter_options(response, o);
  response->add_option("--rate", o.rate, "Sample rate in Hz");
  response->add_option("--freqs", freqs, "start:stop:step or a single frequency, Hz");
  response->add_option("--out,-o", out_path, "CSV output (default stdout)");

  auto* pipeline = app.add_subcommand("pipeline", "Run synth, filter, amplify and detect in one process");
  add_config_options(pipeline, o);
  add_pulse_options(pipeline, o);
  add_filter_options(pipeline, o);
  add_amplifier_options(pipeline, o);
  add_detector_options(pipeline, o);
  pipeline->add_option("--out,-o", out_path, "DetectionResult JSON output (default stdout)");
  pipeline->add_option("--dump-stages", dump_dir, "Directory for raw/noisy/filtered/amplified CSVs");
  pipeline->add_option("--write-config", write_config, "Write the resolved run-config document");
  pipeline->add_flag("--report-snr", report_snr, "Print input and post-filter SNR to stderr");

  auto* eval = app.add_subcommand("eval", "Accuracy statistics for reference tables or synthetic sweeps");
  add_config_options(eval, o);
  add_pulse_options(eval, o);
  add_detector_options(eval, o);
  eval->add_flag("--table1", table1, "Recompute the ECG comparison table");
  eval->add_option("--table", table_name, "Reference table by name (table1, table2)");
  eval->add_option("--denominator", denominator, "actual | measured");
  eval->add_option("--sweep", sweep, "Comma-separated true heart rates");
  eval->add_option("--out,-o", out_path, "JSON output file");
  eval->add_flag("--json", as_json, "Write JSON to stdout instead of the table");

  std::vector<const char*> argv{"hrm"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    }

    RunConfig cfg = resolve_config(o);
    PipelineConfig& p = cfg.pipeline;

    if (synth->parsed()) {
      p.validate();
      write_signal(out_path, synthesize_sensor_signal(p), out);
    } else if (filter->parsed()) {
      const SampledSignal in = read_signal(in_path);
      FilterCoefficients coeffs;
      if (p.coefficients) {
        coeffs = *p.coefficients;
      } else {
        coeffs = design_bandpass(p.filter, in.sample_rate_hz);
      }
      write_signal(out_path, filter_signal(in, coeffs), out);
    } else if (amp->parsed()) {
      const SampledSignal in = read_signal(in_path);
      const AmplifiedSignal a = amplify(in, p.amplifier);
      write_signal(out_path, a.signal, out);
      if (a.saturation_fraction > 0.0) {
        err << "saturation_fraction = " << a.saturation_fraction << '\n';
      }
    } else if (detect->parsed()) {
      const DetectionResult r = run_detector(read_signal(in_path), p.detector);
      write_text(out_path, as_text ? to_text_report(r) : dump_json(to_json(r)), out);
    } else if (response->parsed()) {
      FilterCoefficients coeffs = p.coefficients ? *p.coefficients : design_bandpass(p.filter, p.sample_rate_hz);
      const std::vector<double> f = parse_frequency_range(freqs);
      const std::vector<double> mag = frequency_response(coeffs, f);
      std::ostringstream csv;
      write_response_csv(csv, f, mag);
      write_text(out_path, csv.str(), out);
    } else if (pipeline->parsed()) {
      p.validate();
      const PipelineResult r = run_pipeline(p);
      if (!dump_dir.empty()) {
        std::error_code ec;
        fs::create_directories(dump_dir, ec);
        if (ec) throw IoError("cannot create " + dump_dir + ": " + ec.message());
        const fs::path dir(dump_dir);
        write_signal_csv(dir / "raw.csv", r.raw);
        write_signal_csv(dir / "noisy.csv", r.noisy);
        write_signal_csv(dir / "filtered.csv", r.filtered);
        write_signal_csv(dir / "amplified.csv", r.amplified.signal);
      }
      if (!write_config.empty()) {
        std::ostringstream doc;
        write_run_config(doc, cfg);
        write_text(write_config, doc.str(), out);
      }
      if (report_snr) {
        err << "snr_in_db = " << estimate_snr(r.noisy) << '\n'
            << "snr_out_db = " << estimate_snr(trim_leading(r.filtered, p.settle_s)) << '\n';
      }
      write_text(out_path, dump_json(to_json(r.detection)), out);
    } else if (eval->parsed()) {
      const Denominator d = denominator.empty() ? cfg.eval.denominator : parse_denominator(denominator);
      if (table1) table_name = "table1";
      if (!table_name.empty()) {
        const ReferenceDataset& table = reference_table(table_name);
        nlohmann::json j;
        std::string text;
        if (table.name == "table1") {
          j = table1_json(d);
          text = table1_text(j);
        } else {
          nlohmann::json rows = nlohmann::json::array();
          for (const ReferenceRow& row : table.rows) {
            rows.push_back({{"label", row.label}, {"error_pct", row.printed_error_pct}});
            text += row.label + "  " + std::to_string(row.printed_error_pct) + "\n";
          }
          j = {{"table", table.name}, {"rows", rows}};
        }
        if (!out_path.empty()) write_text(out_path, dump_json(j), out);
        out << (as_json ? dump_json(j) : text);
      } else {
        std::vector<double> bpms = cfg.eval.sweep_bpms;
        if (!sweep.empty()) {
          bpms.clear();
          std::stringstream ss(sweep);
          std::string item;
          while (std::getline(ss, item, ',')) {
            try {
              bpms.push_back(std::stod(item));
            } catch (const std::exception&) {
              throw ValidationError("--sweep: cannot parse '" + item + "'");
            }
          }
        }
        p.validate();
        const EvaluationReport report = evaluate_pipeline(bpms, p, d);
        const nlohmann::json j = to_json(report);
        if (!out_path.empty()) write_text(out_path, dump_json(j), out);
        out << (as_json ? dump_json(j) : to_text_table(report));
      }
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace hrm
