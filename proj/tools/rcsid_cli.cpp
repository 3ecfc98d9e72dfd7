// rcsid command-line front end.
//
// Exit codes: 0 success, 2 validation or usage error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcsid/rcsid.hpp"

namespace fs = std::filesystem;
using namespace rcsid;
using io::ConfigKey;
using io::RunConfig;
using io::ValueType;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

// A subcommand whose tunables are config keys; each key is also a flag
// (--gate-start for gate_start) and flags override the config file.
struct Command {
  CLI::App* app = nullptr;
  std::vector<ConfigKey> schema;
  std::map<std::string, std::string> flags;
  std::string config_path;
  std::string out;

  void bind() {
    app->add_option("--config", config_path, "key = value configuration file");
    for (const auto& k : schema) {
      std::string flag = "--" + k.name;
      for (auto& c : flag)
        if (c == '_') c = '-';
      app->add_option(flag, flags[k.name], k.help);
    }
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig("command line", schema)
                                        : io::read_config(config_path, schema);
    for (const auto& k : schema) {
      std::string flag = "--" + k.name;
      for (auto& c : flag)
        if (c == '_') c = '-';
      if (app->count(flag)) cfg.set(k.name, flags.at(k.name));
    }
    return cfg;
  }
};

double required_number(const RunConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw validation_error("missing required setting '" + key + "'");
  return cfg.number(key, 0.0);
}

// "name=path" pairs; a bare path takes its class name from the file's label
// comment or, failing that, the file stem.
std::map<std::string, RcsSignature> read_labelled(const std::vector<std::string>& specs) {
  std::map<std::string, RcsSignature> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    const std::string path = eq == std::string::npos ? s : s.substr(eq + 1);
    auto sig = io::read_signature(path);
    std::string name = eq == std::string::npos ? sig.label() : s.substr(0, eq);
    if (name.empty()) name = fs::path(path).stem().string();
    if (!out.emplace(name, std::move(sig)).second)
      throw validation_error("class '" + name + "' given more than once");
  }
  return out;
}

SectorSpec parse_sector(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw validation_error("sector '" + s + "': expected center:width in degrees");
  try {
    std::size_t p1 = 0, p2 = 0;
    const double c = std::stod(s.substr(0, colon), &p1);
    const double w = std::stod(s.substr(colon + 1), &p2);
    if (p1 != colon || p2 != s.size() - colon - 1) throw std::invalid_argument("trailing text");
    return SectorSpec(c, w);
  } catch (const validation_error&) {
    throw;
  } catch (const std::exception&) {
    throw validation_error("sector '" + s + "': expected center:width in degrees");
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    io::write_text(path, text);
}

void write_manifest(io::RunManifest& m, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") return;
  m.add_output(out_path);
  m.write(out_path + ".manifest.json");
}

std::string region_name(ScatterRegion r) {
  switch (r) {
    case ScatterRegion::Rayleigh: return "Rayleigh";
    case ScatterRegion::Mie: return "Mie";
    case ScatterRegion::Optical: return "Optical";
  }
  return "?";
}

ChamberGeometry geometry_from(const RunConfig& c) {
  return ChamberGeometry{c.number("focal_length", 2.5), c.number("outside_distance", 6.0),
                         from_dbsm(c.number("tx_gain_dbi", 20.0)), from_dbsm(c.number("rx_gain_dbi", 20.0)),
                         1.0};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rcsid: RCS calibration, statistical modelling and UAV recognition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  // ---- mie ----
  auto* mie = app.add_subcommand("mie", "PEC sphere RCS: prints sigma_m2,sigma_dbsm,region");
  double radius = 0.0, freq = 0.0;
  mie->add_option("--radius", radius, "sphere radius (m)")->required();
  mie->add_option("--freq", freq, "frequency (Hz)")->required();
  auto* exact_flag = mie->add_flag("--exact", "exact series (default)");
  auto* approx_flag = mie->add_flag("--approx", "region approximation");
  exact_flag->excludes(approx_flag);

  // ---- synth ----
  Command synth;
  synth.app = app.add_subcommand("synth", "synthesize target, background and sphere-reference sweeps");
  synth.schema = {
      {"f_start", ValueType::Number, "first frequency (Hz)"},
      {"f_stop", ValueType::Number, "last frequency (Hz)"},
      {"n_freq", ValueType::Integer, "number of frequency points"},
      {"target_delay_ns", ValueType::Number, "round-trip delay of the target zone (ns)"},
      {"clutter_delays_ns", ValueType::NumberList, "clutter echo delays (ns)"},
      {"clutter_amplitudes", ValueType::NumberList, "clutter echo amplitudes (linear)"},
      {"background_amplitude", ValueType::Number, "static chamber background amplitude"},
      {"background_delay_ns", ValueType::Number, "static background delay (ns)"},
      {"noise_floor_db", ValueType::Number, "noise power relative to the mean target echo (dB)"},
      {"focal_length", ValueType::Number, "reflector focal length (m)"},
      {"outside_distance", ValueType::Number, "distance outside the focus (m)"},
      {"tx_gain_dbi", ValueType::Number, "transmit antenna gain (dBi)"},
      {"rx_gain_dbi", ValueType::Number, "receive antenna gain (dBi)"},
      {"sphere_radius", ValueType::Number, "calibration sphere radius (m)"},
      {"seed", ValueType::Integer, "random seed"},
  };
  synth.bind();
  std::string synth_target, synth_bg_out, synth_ref_out;
  synth.app->add_option("--target", synth_target, "target signature CSV")->required();
  synth.app->add_option("--out", synth.out, "target sweep CSV")->required();
  synth.app->add_option("--background-out", synth_bg_out, "background sweep CSV")->required();
  synth.app->add_option("--reference-out", synth_ref_out, "sphere reference sweep CSV")->required();

  // ---- process ----
  Command proc;
  proc.app = app.add_subcommand("process", "turn a raw sweep into a calibrated signature");
  proc.schema = {
      {"gate_start_ns", ValueType::Number, "gate start (ns)"},
      {"gate_stop_ns", ValueType::Number, "gate stop (ns)"},
      {"taper", ValueType::Number, "Tukey taper fraction in [0, 1]"},
      {"pad", ValueType::Integer, "zero-pad factor"},
      {"center_freq", ValueType::Number, "extraction frequency (Hz); default band center"},
      {"sphere_radius", ValueType::Number, "calibration sphere radius (m)"},
      {"label", ValueType::Text, "class label stored in the output"},
  };
  proc.bind();
  std::string proc_sweep, proc_bg, proc_ref;
  proc.app->add_option("--sweep", proc_sweep, "target sweep CSV")->required();
  proc.app->add_option("--background", proc_bg, "background sweep CSV")->required();
  proc.app->add_option("--reference", proc_ref, "sphere reference sweep CSV")->required();
  proc.app->add_option("--out", proc.out, "output signature CSV (default stdout)");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of one family");
  std::string fit_input, fit_family, fit_out;
  fit->add_option("--input", fit_input, "signature CSV")->required();
  fit->add_option("--family", fit_family, "distribution family")->required();
  fit->add_option("--out", fit_out, "output JSON (default stdout)");

  // ---- rank ----
  auto* rank = app.add_subcommand("rank", "fit all families and rank them by AIC and BIC");
  std::vector<std::string> rank_inputs;
  std::string rank_out;
  rank->add_option("--input", rank_inputs, "[class=]signature.csv (repeatable)")->required();
  rank->add_option("--out", rank_out, "ranking CSV (default stdout)");

  // ---- build-db ----
  auto* bdb = app.add_subcommand("build-db", "build a model database");
  std::vector<std::string> bdb_inputs, bdb_stats;
  std::string bdb_criterion = "aic", bdb_out, bdb_ranking_out, bdb_pol = "VV";
  double bdb_freq = 0.0;
  bdb->add_option("--input", bdb_inputs, "[class=]signature.csv (repeatable)");
  bdb->add_option("--stats", bdb_stats,
                  "class=mean_db:std_db, lognormal class model from dBsm statistics (repeatable)");
  bdb->add_option("--criterion", bdb_criterion, "aic or bic");
  bdb->add_option("--freq", bdb_freq, "frequency (Hz) recorded in the database");
  bdb->add_option("--polarization", bdb_pol, "VV or HH recorded in the database");
  bdb->add_option("--out", bdb_out, "database JSON (default stdout)");
  bdb->add_option("--ranking-out", bdb_ranking_out, "ranking CSV for the trained classes");

  // ---- classify ----
  auto* cls = app.add_subcommand("classify", "MAP decision for one signature");
  std::string cls_db, cls_input, cls_sector, cls_out;
  cls->add_option("--db", cls_db, "database JSON")->required();
  cls->add_option("--input", cls_input, "signature CSV")->required();
  cls->add_option("--sector", cls_sector, "center:width in degrees, e.g. 0:120");
  cls->add_option("--out", cls_out, "decision CSV (default stdout)");

  // ---- simulate ----
  Command sim;
  sim.app = app.add_subcommand("simulate", "Monte Carlo accuracy versus SNR");
  sim.schema = {
      {"snr", ValueType::NumberList, "SNR grid in dB, comma separated"},
      {"trials", ValueType::Integer, "test signatures per class and SNR"},
      {"samples", ValueType::Integer, "samples per test signature when drawing from a model"},
      {"seed", ValueType::Integer, "random seed"},
      {"threads", ValueType::Integer, "worker threads (results do not depend on it)"},
      {"sector", ValueType::Text, "center:width in degrees"},
      {"hold_out", ValueType::Text, "class removed from the database"},
      {"criterion", ValueType::Text, "aic or bic, when training from signatures"},
  };
  sim.bind();
  std::string sim_db;
  std::vector<std::string> sim_train, sim_replay;
  bool sim_svg = false;
  sim.app->add_option("--db", sim_db, "database JSON");
  sim.app->add_option("--train", sim_train, "[class=]signature.csv to train from (repeatable)");
  sim.app->add_option("--replay", sim_replay, "class=signature.csv replayed instead of drawn (repeatable)");
  sim.app->add_option("--out", sim.out, "output prefix")->required();
  sim.app->add_flag("--svg", sim_svg, "also write an accuracy plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    const auto used = app.get_subcommands();
    std::cerr << (used.empty() ? app.help() : used.front()->help());
    return exit_validation;
  }

  try {
    if (mie->parsed()) {
      const Sphere s{radius};
      const double lambda = wavelength_of(freq);
      double sigma;
      ScatterRegion region;
      if (approx_flag->count()) {
        const auto r = sphere_rcs_approx(s, lambda);
        sigma = r.sigma;
        region = r.region;
      } else {
        sigma = sphere_rcs_exact(s, lambda);
        region = classify_region(s, lambda);
      }
      std::cout << io::format_double(sigma) << ',' << io::format_double(to_dbsm(sigma)) << ','
                << region_name(region) << '\n';
      return 0;
    }

    if (synth.app->parsed()) {
      const auto cfg = synth.resolve();
      io::RunManifest man;
      man.command = "synth";
      man.config_hash = io::sha256_hex(cfg.canonical());
      const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
      man.seed = seed;
      const auto target = io::read_signature(synth_target);
      man.add_input(synth_target);

      const auto freqs = linear_frequencies(cfg.number("f_start", 14e9), cfg.number("f_stop", 16e9),
                                            static_cast<std::size_t>(cfg.integer("n_freq", 201)));
      const auto delays = cfg.numbers("clutter_delays_ns", {});
      const auto amps = cfg.numbers("clutter_amplitudes", std::vector<double>(delays.size(), 0.0));
      if (amps.size() != delays.size())
        throw validation_error("clutter_delays_ns and clutter_amplitudes differ in length");
      ClutterSpec clutter;
      for (std::size_t i = 0; i < delays.size(); ++i) clutter.echoes.push_back({delays[i] * 1e-9, amps[i]});
      const double bg_amp = cfg.number("background_amplitude", 1e-3);
      const double bg_delay = cfg.number("background_delay_ns", 2.0) * 1e-9;
      for (double f : freqs) clutter.background.push_back(std::polar(bg_amp, -2.0 * std::numbers::pi * f * bg_delay));

      const auto geom = geometry_from(cfg);
      const double noise_db = cfg.number("noise_floor_db", -80.0);
      const double delay = cfg.number("target_delay_ns", 20.0) * 1e-9;
      const SynthesisConfig tcfg{freqs, delay, derive_seed(seed, {1})};
      const auto sweep = synthesize_sweep(target, clutter, geom, noise_db, tcfg);

      const Sphere sphere{cfg.number("sphere_radius", 0.1524)};
      const double fc = 0.5 * (freqs.front() + freqs.back());
      const RcsSignature ref_sig({0.0}, {sphere_rcs_exact(sphere, wavelength_of(fc))}, fc,
                                 target.polarization(), "sphere");
      const SynthesisConfig rcfg{freqs, delay, derive_seed(seed, {2})};
      const auto ref = synthesize_sweep(ref_sig, clutter, geom, noise_db, rcfg);

      // Background noise matches the target sweep's absolute noise power.
      double mean_sigma = 0.0;
      for (double v : target.rcs()) mean_sigma += v;
      mean_sigma /= static_cast<double>(target.size());
      const double noise_abs = std::isfinite(noise_db)
                                   ? echo_power(mean_sigma, fc, geom) * std::pow(10.0, noise_db / 10.0)
                                   : 0.0;
      const auto bg = synthesize_background(clutter, noise_abs, {freqs, delay, derive_seed(seed, {3})},
                                            target.polarization());

      io::write_sweep(synth.out, sweep);
      io::write_sweep(synth_bg_out, bg);
      io::write_sweep(synth_ref_out, ref);
      man.add_output(synth_bg_out);
      man.add_output(synth_ref_out);
      write_manifest(man, synth.out);
      return 0;
    }

    if (proc.app->parsed()) {
      const auto cfg = proc.resolve();
      io::RunManifest man;
      man.command = "process";
      man.config_hash = io::sha256_hex(cfg.canonical());
      const auto sweep = io::read_sweep(proc_sweep);
      const auto bg = io::read_sweep(proc_bg);
      const auto ref = io::read_sweep(proc_ref);
      for (const auto* p : {&proc_sweep, &proc_bg, &proc_ref}) man.add_input(*p);
      const GateSpec gate{required_number(cfg, "gate_start_ns") * 1e-9,
                          required_number(cfg, "gate_stop_ns") * 1e-9, cfg.number("taper", 0.5)};
      ProcessOptions opt;
      opt.zero_pad_factor = static_cast<int>(cfg.integer("pad", 4));
      if (cfg.has("center_freq")) opt.center_frequency = cfg.number("center_freq", 0.0);
      const Calibration cal{ref, Sphere{cfg.number("sphere_radius", 0.1524)}};
      const auto sig = process_sweep(sweep, bg, gate, cal, opt, cfg.text("label", ""));
      emit(proc.out, io::signature_csv(sig));
      write_manifest(man, proc.out);
      return 0;
    }

    if (fit->parsed()) {
      const auto family = parse_family(fit_family);
      const auto sig = io::read_signature(fit_input);
      const auto model = fit_mle(family, sig.rcs());
      emit(fit_out, io::dump(io::to_json(model)));
      io::RunManifest man;
      man.command = "fit";
      man.add_input(fit_input);
      write_manifest(man, fit_out);
      return 0;
    }

    if (rank->parsed()) {
      const auto sigs = read_labelled(rank_inputs);
      std::map<std::string, Ranking> rankings;
      for (const auto& [name, sig] : sigs) rankings.emplace(name, rank_models(sig.rcs()));
      emit(rank_out, io::ranking_csv(rankings));
      for (const auto& [name, r] : rankings)
        for (const auto& s : r.skipped)
          std::cerr << "note: " << name << ": " << family_name(s.family) << " skipped: " << s.reason << '\n';
      io::RunManifest man;
      man.command = "rank";
      for (const auto& in : rank_inputs) man.add_input(in.substr(in.find('=') + 1));
      write_manifest(man, rank_out);
      return 0;
    }

    if (bdb->parsed()) {
      if (bdb_inputs.empty() == bdb_stats.empty())
        throw validation_error("build-db: give either --input signatures or --stats class models");
      const auto criterion = parse_criterion(bdb_criterion);
      const DatabaseMetadata meta{bdb_freq, parse_polarization(bdb_pol)};
      io::RunManifest man;
      man.command = "build-db";
      ModelDatabase db;
      if (!bdb_inputs.empty()) {
        const auto sigs = read_labelled(bdb_inputs);
        std::map<std::string, std::vector<double>> training;
        for (const auto& [name, sig] : sigs) training.emplace(name, sig.rcs());
        auto built = build_database_with_rankings(training, criterion, meta);
        db = std::move(built.db);
        if (!bdb_ranking_out.empty()) io::write_text(bdb_ranking_out, io::ranking_csv(built.rankings));
        for (const auto& in : bdb_inputs) man.add_input(in.substr(in.find('=') + 1));
      } else {
        db.criterion = criterion;
        db.frequency = meta.frequency;
        db.polarization = meta.polarization;
        for (const auto& s : bdb_stats) {
          const auto eq = s.find('='), colon = s.rfind(':');
          if (eq == std::string::npos || colon == std::string::npos || colon < eq)
            throw validation_error("--stats '" + s + "': expected class=mean_db:std_db");
          double mean_db, std_db;
          try {
            mean_db = std::stod(s.substr(eq + 1, colon - eq - 1));
            std_db = std::stod(s.substr(colon + 1));
          } catch (const std::exception&) {
            throw validation_error("--stats '" + s + "': expected class=mean_db:std_db");
          }
          // A model specified from published statistics has no training likelihood.
          db.classes.insert_or_assign(s.substr(0, eq),
                                      FittedModel{lognormal_from_db_stats(mean_db, std_db), 2, 0.0, 0});
        }
      }
      emit(bdb_out, io::dump(io::to_json(db)));
      write_manifest(man, bdb_out);
      return 0;
    }

    if (cls->parsed()) {
      const auto db = io::read_database(cls_db);
      const auto sig = io::read_signature(cls_input);
      if (sig.frequency() > 0.0 && db.frequency > 0.0 &&
          std::abs(sig.frequency() - db.frequency) > 1e-3 * db.frequency)
        throw validation_error(cls_input + ": signature frequency " + io::format_double(sig.frequency()) +
                               " Hz does not match the database (" + io::format_double(db.frequency) + " Hz)");
      const auto result = cls_sector.empty() ? classify_map(db, sig.rcs())
                                             : classify_sector(db, sig, parse_sector(cls_sector));
      emit(cls_out, io::decision_csv(result));
      io::RunManifest man;
      man.command = "classify";
      man.add_input(cls_db);
      man.add_input(cls_input);
      write_manifest(man, cls_out);
      return 0;
    }

    if (sim.app->parsed()) {
      const auto cfg = sim.resolve();
      if (sim_db.empty() == sim_train.empty())
        throw validation_error("simulate: give exactly one of --db or --train");
      io::RunManifest man;
      man.command = "simulate";
      man.config_hash = io::sha256_hex(cfg.canonical());
      const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
      man.seed = seed;

      ModelDatabase db;
      if (!sim_db.empty()) {
        db = io::read_database(sim_db);
        man.add_input(sim_db);
      } else {
        std::map<std::string, std::vector<double>> training;
        for (const auto& [name, sig] : read_labelled(sim_train)) training.emplace(name, sig.rcs());
        db = build_database(training, parse_criterion(cfg.text("criterion", "aic")));
        for (const auto& in : sim_train) man.add_input(in.substr(in.find('=') + 1));
      }
      const auto trials = cfg.integer("trials", 500), samples = cfg.integer("samples", 181),
                 threads = cfg.integer("threads", 1);
      if (trials < 1 || samples < 1 || threads < 1)
        throw validation_error("simulate: trials, samples and threads must be positive");
      std::vector<double> grid = cfg.numbers("snr", {0, 2, 4, 6, 8, 10, 12, 14});
      const std::string prefix = sim.out;

      if (cfg.has("hold_out")) {
        if (!sim_replay.empty() || cfg.has("sector"))
          throw validation_error("simulate: --hold-out cannot be combined with --replay or --sector");
        HeldOutOptions ho{db.criterion, grid, static_cast<std::size_t>(trials),
                          static_cast<std::size_t>(samples), seed, static_cast<unsigned>(threads)};
        const auto reports = held_out_experiment(db, cfg.text("hold_out", ""), ho);
        std::string csv = "snr_db,held_out,class,fraction\n";
        for (const auto& r : reports)
          for (const auto& [name, frac] : r.assignment_histogram)
            csv += io::format_double(r.snr_db) + "," + r.held_out_class + "," + name + "," +
                   io::format_double(frac) + "\n";
        io::write_text(prefix + "_heldout.csv", csv);
        man.add_output(prefix + "_heldout.csv");
        man.write(prefix + "_manifest.json");
        return 0;
      }

      std::map<std::string, Generator> gens;
      for (const auto& [name, model] : db.classes) gens.emplace(name, model.dist);
      for (const auto& [name, sig] : read_labelled(sim_replay)) {
        if (!db.classes.count(name))
          throw validation_error("--replay: class '" + name + "' is not in the database");
        gens.insert_or_assign(name, sig);
      }
      for (const auto& r : sim_replay) man.add_input(r.substr(r.find('=') + 1));
      SweepOptions opt{grid, static_cast<std::size_t>(trials), static_cast<std::size_t>(samples),
                       std::nullopt, seed, static_cast<unsigned>(threads)};
      if (cfg.has("sector")) opt.sector = parse_sector(cfg.text("sector", ""));
      const auto result = run_snr_sweep(db, gens, opt);
      io::write_text(prefix + "_counts.csv", io::counts_csv(result));
      io::write_text(prefix + "_accuracy.csv", io::accuracy_csv(result));
      man.add_output(prefix + "_counts.csv");
      man.add_output(prefix + "_accuracy.csv");
      if (sim_svg) {
        const std::string name = opt.sector ? "sector" : "full azimuth";
        io::write_text(prefix + "_accuracy.svg",
                       io::accuracy_svg({{name, result.snr_grid, result.accuracy}}, "Average accuracy vs SNR"));
        man.add_output(prefix + "_accuracy.svg");
      }
      man.write(prefix + "_manifest.json");
      for (std::size_t i = 0; i < result.snr_grid.size(); ++i)
        std::cout << io::format_double(result.snr_grid[i]) << " dB: " << io::format_double(result.accuracy[i])
                  << '\n';
      return 0;
    }
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return 0;
}
