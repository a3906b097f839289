// restless: command-line runner for the simulated restless tuneup experiments.
//
//   restless <command> [--config FILE] [--seed N] [--mode restless|conventional]
//                      [--jobs N] [--out-dir DIR] [command options]
//
// Exit codes: 0 ok, 1 usage, 2 config, 3 simulation, 4 fit, 5 file I/O.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "restless/io.hpp"

using namespace restless;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kSimulation = 3, kFit = 4, kIo = 5 };

struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string mode = "restless";
  int jobs = 1;
  std::string out_dir;
};

Mode parse_mode(const std::string& m) { return m == "conventional" ? Mode::Conventional : Mode::Restless; }

ExperimentConfig resolve_config(const Globals& g) {
  std::string text;
  std::string source = "<built-in default>";
  if (g.config_path.empty()) {
    text = R"({"rng": {"algorithm": "mt19937_64/restless-v1", "master_seed": 1}, "physics": {}})";
  } else {
    try {
      text = read_file(g.config_path);
    } catch (const std::exception& e) {
      throw ConfigError({e.what()});
    }
    source = g.config_path;
  }
  ExperimentConfig cfg = parse_config(text, source);
  if (g.seed) {
    json doc = cfg.document;
    doc["rng"]["master_seed"] = *g.seed;
    cfg = parse_config(doc.dump(2), source + " (with --seed)");
  }
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

void emit(const ExperimentConfig& cfg, const std::string& name, const std::string& content) {
  const std::string path = out_path(cfg, name);
  try {
    write_file(path, content);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
  std::cout << "wrote " << path << "\n";
}

void emit_json(const ExperimentConfig& cfg, const std::string& name, const json& j) { emit(cfg, name, j.dump(2) + "\n"); }

std::vector<double> grid_from(const json& spec) {
  const double lo = spec.at("lo"), hi = spec.at("hi");
  const int count = spec.at("count");
  const bool log = spec.value("log", false);
  if (log && !(lo > 0.0 && hi > 0.0)) throw ConfigError({"log grid needs positive bounds"});
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    g.push_back(log ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
  }
  return g;
}

// ---------------------------------------------------------------------------

int cmd_tuneup(const Globals& g, int n_params_flag, const std::vector<int>& starts_flag) {
  const auto cfg = resolve_config(g);
  const Mode mode = parse_mode(g.mode);
  const json sec = cfg.section("tuneup");
  const int n_params = n_params_flag ? n_params_flag : sec.value("n_params", 2);
  if (n_params != 2 && n_params != 3) throw ConfigError({"--n-params must be 2 or 3"});
  std::vector<int> starts = starts_flag;
  if (starts.empty()) starts = sec.value("start_conditions", std::vector<int>{0, 1, 2, 3});
  for (int s : starts)
    if (s < 0 || s > 3) throw ConfigError({"start condition index must be 0..3"});
  const auto crb_n_cl = sec.value("crb_n_cl", default_crb_lengths());
  const int crb_reps = sec.value("crb_repetitions", 5);
  const auto all_starts = standard_start_conditions(cfg.physics.opt, n_params, sec.value("detuning_start_hz", 250e3));
  const auto prov = provenance_for(cfg, "tuneup");
  const std::string tag = std::string(mode_name(mode)) + "_" + std::to_string(n_params) + "p";

  std::vector<TuneupReport> reports(starts.size());
  std::vector<RBRun> crbs(starts.size());
  parallel_for(starts.size(), g.jobs, [&](std::size_t k) {
    const int s = starts[k];
    SimContext ctx(cfg.physics, cfg.acquisition, derive_seed(cfg.master_seed, 0x70000u + static_cast<std::uint64_t>(s)));
    reports[k] = two_step_tuneup(ctx, all_starts[static_cast<std::size_t>(s)], mode, n_params, cfg.optimizer);
    crbs[k] = run_rb(cfg.physics, cfg.acquisition, derive_seed(cfg.master_seed, 0xc0000u + static_cast<std::uint64_t>(s)),
                     reports[k].final_params, Mode::Conventional, crb_n_cl, crb_reps);
  });

  json campaign = json::array();
  double f_sum = 0, tau_sum = 0, nit_sum = 0;
  bool fit_failed = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    json r = to_json(reports[k]);
    r["start_condition"] = starts[k];
    r["provenance"] = to_json(prov);
    r["crb"] = crbs[k].fit_ok ? to_json(crbs[k].fit) : json{{"error", crbs[k].fit_error}};
    r["final_f_cl"] = crbs[k].fit_ok ? json(crbs[k].fit.f_cl) : json(nullptr);
    fit_failed = fit_failed || !crbs[k].fit_ok;
    const std::string base = "tuneup_" + tag + "_start" + std::to_string(starts[k]);
    emit_json(cfg, base + ".json", r);
    emit(cfg, base + "_trajectory.csv", trajectory_csv(reports[k], prov));
    f_sum += crbs[k].fit.f_cl;
    tau_sum += reports[k].simulated_time;
    nit_sum += reports[k].n_iterations;
    campaign.push_back({{"start_condition", starts[k]}, {"final_f_cl", r["final_f_cl"]},
                        {"n_iterations", reports[k].n_iterations}, {"simulated_time_s", reports[k].simulated_time}});
    std::printf("start %d: N_it %d, tau %.1f s, F_Cl %.5f\n", starts[k], reports[k].n_iterations,
                reports[k].simulated_time, crbs[k].fit.f_cl);
  }
  const double n = static_cast<double>(starts.size());
  emit_json(cfg, "tuneup_" + tag + "_summary.json",
            {{"provenance", to_json(prov)}, {"mode", mode_name(mode)}, {"n_params", n_params}, {"runs", campaign},
             {"mean_f_cl", f_sum / n}, {"mean_simulated_time_s", tau_sum / n}, {"mean_n_iterations", nit_sum / n}});
  if (fit_failed) throw FitFailure("closing CRB fit failed for at least one run");
  return kOk;
}

int cmd_landscape(const Globals& g, int n_cl_flag) {
  const auto cfg = resolve_config(g);
  const Mode mode = parse_mode(g.mode);
  const json sec = cfg.section("landscape");
  const int n_cl = n_cl_flag ? n_cl_flag : sec.value("n_cl", 300);
  const auto opt = cfg.physics.opt;
  const json ag_spec = sec.value("a_g", json{{"lo", 0.94 * opt.a_g}, {"hi", 1.06 * opt.a_g}, {"count", 13}});
  const json ad_spec = sec.value("a_d", json{{"lo", 0.5 * opt.a_d}, {"hi", 2.0 * opt.a_d}, {"count", 9}, {"log", true}});
  const auto ls = run_landscape(cfg.physics, cfg.acquisition, cfg.master_seed, grid_from(ag_spec), grid_from(ad_spec),
                                n_cl, mode, g.jobs);
  const auto prov = provenance_for(cfg, "landscape");
  CsvWriter csv(prov, {"a_g", "a_d", "epsilon", "is_argmin"});
  for (std::size_t k = 0; k < ls.points.size(); ++k)
    csv.row({fmt(ls.points[k].a_g), fmt(ls.points[k].a_d), fmt(ls.points[k].epsilon), k == ls.argmin ? "1" : "0"});
  const std::string tag = std::string(mode_name(mode));
  emit(cfg, "landscape_" + tag + ".csv", csv.str());
  const auto& best = ls.points[ls.argmin];
  emit_json(cfg, "landscape_" + tag + ".json",
            {{"provenance", to_json(prov)}, {"mode", tag}, {"n_cl", n_cl},
             {"argmin", {{"a_g", best.a_g}, {"a_d", best.a_d}, {"epsilon", best.epsilon}}},
             {"simulated_acquisition_time_s", ls.simulated_time}});
  std::printf("argmin A_G %.4f A_D %.4f eps %.4f, simulated acquisition %.1f s\n", best.a_g, best.a_d, best.epsilon,
              ls.simulated_time);
  return kOk;
}

int cmd_rb(const Globals& g, const std::vector<int>& n_cl_flag, int reps_flag) {
  const auto cfg = resolve_config(g);
  const Mode mode = parse_mode(g.mode);
  const json sec = cfg.section("rb");
  const auto n_cl = n_cl_flag.empty() ? sec.value("n_cl", default_crb_lengths()) : n_cl_flag;
  const int reps = reps_flag ? reps_flag : sec.value("repetitions", 10);
  std::set<int> distinct(n_cl.begin(), n_cl.end());
  if (distinct.size() < 3) throw ConfigError({"rb needs at least 3 distinct N_Cl values"});
  const auto run = run_rb(cfg.physics, cfg.acquisition, cfg.master_seed, cfg.physics.opt, mode, n_cl, reps, g.jobs);
  const auto prov = provenance_for(cfg, "rb");
  CsvWriter csv(prov, {"n_cl", "epsilon_mean", "epsilon_stderr", "repetitions"});
  for (const auto& d : run.data) csv.row({std::to_string(d.n_cl), fmt(d.mean), fmt(d.stderr_), std::to_string(reps)});
  const std::string tag(mode_name(mode));
  emit(cfg, "rb_" + tag + ".csv", csv.str());
  json fit = run.fit_ok ? to_json(run.fit) : json{{"error", run.fit_error}};
  emit_json(cfg, "rb_" + tag + "_fit.json", {{"provenance", to_json(prov)}, {"mode", tag}, {"fit", fit}});
  if (!run.fit_ok) throw FitFailure("rb fit failed: " + run.fit_error);
  std::printf("F_Cl %.5f +- %.5f (p_cl %.6f)\n", run.fit.f_cl, run.fit.f_cl_stderr, run.fit.p_cl);
  return kOk;
}

int cmd_snr(const Globals& g, bool model_only) {
  const auto cfg = resolve_config(g);
  const json sec = cfg.section("snr");
  const auto f_as = sec.value("f_a", std::vector<double>{0.989, 0.996, 0.998});
  const json grid_spec = sec.value("n_cl", json{{"lo", 2}, {"hi", 2000}, {"count", 32}});
  const auto grid = log_spaced_grid(grid_spec.at("lo"), grid_spec.at("hi"), grid_spec.at("count"));
  const int blocks = sec.value("blocks", 10), reps = sec.value("reps_per_block", 50);
  const auto prov = provenance_for(cfg, "snr");
  CsvWriter csv(prov, {"f_a", "n_cl", "model_signal", "model_noise", "model_binomial_noise", "model_snr",
                       "monte_carlo_signal", "monte_carlo_signal_stderr", "monte_carlo_noise", "monte_carlo_snr"});
  NoiseModelParams binomial = cfg.noise_model;
  binomial.t1_sigma = 0.0;
  json summary = json::array();
  for (std::size_t i = 0; i < f_as.size(); ++i) {
    const double f_a = f_as[i];
    const auto scan = snr_scan(f_a, grid, cfg.noise_model);
    std::vector<MonteCarloSNRPoint> mc;
    if (!model_only)
      mc = monte_carlo_snr(cfg.physics, cfg.noise_model, f_a, grid, cfg.acquisition.n_shots, cfg.acquisition.n_seeds,
                           blocks, reps, derive_seed(cfg.master_seed, 0x5000u + i), g.jobs);
    int mc_argmax = 0;
    double mc_max = -1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& p = scan.points[k];
      const double binom = 0.5 * (std::sqrt(epsilon_mean_and_var(binomial, 1.0 - scan.f_a, p.n_cl).variance) +
                                  std::sqrt(epsilon_mean_and_var(binomial, 1.0 - scan.f_b, p.n_cl).variance));
      std::vector<std::string> row{fmt(f_a), std::to_string(p.n_cl), fmt(p.signal), fmt(p.noise), fmt(binom), fmt(p.snr)};
      if (model_only) {
        row.insert(row.end(), {"", "", "", ""});
      } else {
        row.insert(row.end(), {fmt(mc[k].signal), fmt(mc[k].signal_stderr), fmt(mc[k].noise), fmt(mc[k].snr)});
        if (mc[k].snr > mc_max) {
          mc_max = mc[k].snr;
          mc_argmax = mc[k].n_cl;
        }
      }
      csv.row(row);
    }
    json s = {{"f_a", f_a}, {"f_b", scan.f_b}, {"model_max_snr", scan.max_snr}, {"model_argmax_n_cl", scan.argmax_n_cl}};
    if (!model_only) {
      s["monte_carlo_max_snr"] = mc_max;
      s["monte_carlo_argmax_n_cl"] = mc_argmax;
    }
    summary.push_back(s);
    std::printf("f_a %.3f: model max SNR %.1f at N_Cl %d\n", f_a, scan.max_snr, scan.argmax_n_cl);
  }
  emit(cfg, "snr.csv", csv.str());
  emit_json(cfg, "snr_summary.json", {{"provenance", to_json(prov)}, {"levels", summary}});
  return kOk;
}

int cmd_psd(const Globals& g, const std::string& input) {
  const auto cfg = resolve_config(g);
  const json sec = cfg.section("psd");
  const std::size_t n_seg = sec.value("n_segments", 234), seg_len = sec.value("segment_length", 21);
  const double dt = sec.value("dt_s", 2.0);
  const double f_l = sec.value("f_l_hz", 1.0 / 3.7), f_u = sec.value("f_u_hz", 1.0 / 0.074);
  T1Series series;
  if (input.empty()) {
    series = synthesize_series(cfg.physics.t1_psd, dt, n_seg, seg_len, cfg.noise_model.t1_mean,
                               derive_seed(cfg.master_seed, 0x9500u));
  } else {
    try {
      series = read_t1_series_csv(read_file(input), seg_len);
    } catch (const std::exception& e) {
      throw IoFailure(e.what());
    }
    const std::size_t whole = series.values.size() / seg_len * seg_len;
    series.values.resize(whole);
  }
  const auto prov = provenance_for(cfg, "psd");
  const auto psd = estimate_psd(series);
  PowerLawFit fit;
  try {
    fit = fit_powerlaw(psd);
  } catch (const std::exception& e) {
    emit(cfg, "psd.csv", psd_csv(psd, prov));
    throw FitFailure(e.what());
  }
  emit(cfg, "t1_series.csv", t1_series_csv(series, prov));
  emit(cfg, "psd.csv", psd_csv(psd, prov));
  emit_json(cfg, "psd_fit.json",
            {{"provenance", to_json(prov)},
             {"alpha_s2_per_hz", fit.law.alpha},
             {"beta", fit.law.beta},
             {"n_bins_used", fit.n_bins_used},
             {"residual_rms_log10", fit.residual_rms},
             {"band_hz", {f_l, f_u}},
             {"sigma_t1_fit_s", sigma_from_psd(fit.law, f_l, f_u)},
             {"sigma_t1_configured_law_s", sigma_from_psd(cfg.physics.t1_psd, f_l, f_u)}});
  std::printf("alpha %.3g s^2/Hz, beta %.3f, sigma_T1 %.3g s\n", fit.law.alpha, fit.law.beta,
              sigma_from_psd(fit.law, f_l, f_u));
  return kOk;
}

int cmd_gst(const Globals& g, const std::string& gateset, bool literal) {
  json doc;
  try {
    doc = json::parse(read_file(gateset));
  } catch (const json::parse_error& e) {
    throw ConfigError({gateset + ": " + e.what()});
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
  GateSet gs;
  try {
    gs = gate_set_from_json(doc);
  } catch (const std::exception& e) {
    throw ConfigError({gateset + ": " + e.what()});
  }
  const auto f = clifford_fidelity(gs, literal ? NegativeRotation::Literal : NegativeRotation::ErrorTransfer);
  for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
  // The gate set file stands in for the config in the provenance block.
  ExperimentConfig cfg;
  cfg.output_dir = g.out_dir.empty() ? "out" : g.out_dir;
  json out = to_json(f);
  out["provenance"] = {{"config_hash", config_hash(doc)}, {"master_seed", nullptr}, {"tool_version", kToolVersion},
                       {"command", "gst-fcl"}};
  out["negative_rotations"] = literal ? "literal" : "error_transfer";
  emit_json(cfg, "gst_fcl.json", out);
  std::printf("F_Cl %.8f (p_cl %.8f)\n", f.f_cl, f.p_cl);
  return kOk;
}

int cmd_timing(const Globals& g, int n_cl_flag) {
  const auto cfg = resolve_config(g);
  const int n_cl = n_cl_flag ? n_cl_flag : cfg.section("timing").value("n_cl", 300);
  const auto bars = timing_breakdown(cfg.physics, cfg.acquisition.n_shots, n_cl, cfg.acquisition.init_wait);
  json arr = json::array();
  for (const auto& b : bars) {
    arr.push_back({{"mode", mode_name(b.mode)}, {"pipeline", b.pipeline}, {"set_params_s", b.set_params},
                   {"acquire_s", b.acquire}, {"process_s", b.process}, {"misc_s", b.misc}, {"total_s", b.total()}});
    std::printf("%-8s %-12s set %.3f  acquire %.3f  process %.3f  misc %.3f  total %.3f s\n", b.pipeline.c_str(),
                std::string(mode_name(b.mode)).c_str(), b.set_params, b.acquire, b.process, b.misc, b.total());
  }
  emit_json(cfg, "timing.json",
            {{"provenance", to_json(provenance_for(cfg, "timing"))}, {"n_shots", cfg.acquisition.n_shots},
             {"n_cl", n_cl}, {"init_wait_s", cfg.acquisition.init_wait}, {"bars", arr}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated restless single-qubit gate tuneup"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment configuration (JSON)");
  app.add_option("--seed", g.seed, "Override rng.master_seed");
  app.add_option("--mode", g.mode, "Cost function / sequence type")
      ->check(CLI::IsMember({"restless", "conventional"}));
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Output directory (overrides output_dir)");

  int n_params = 0, n_cl = 0, reps = 0;
  std::vector<int> starts, n_cl_list;
  std::string input, gateset;
  bool model_only = false, literal = false;

  auto* tuneup = app.add_subcommand("tuneup", "Two-step Nelder-Mead tuneup with closing CRB");
  tuneup->add_option("--n-params", n_params, "2 (A_G, A_D) or 3 (+ detuning)")->check(CLI::IsMember({2, 3}));
  tuneup->add_option("--start", starts, "Start condition index 0..3 (repeatable)");
  auto* landscape = app.add_subcommand("landscape", "Cost over an A_G x A_D grid");
  landscape->add_option("--n-cl", n_cl, "Sequence length");
  auto* rb = app.add_subcommand("rb", "Randomized benchmarking with decay fit");
  rb->add_option("--n-cl", n_cl_list, "Sequence lengths");
  rb->add_option("--repetitions", reps, "Streams per length");
  auto* snr = app.add_subcommand("snr", "Signal, noise and SNR versus N_Cl");
  snr->add_flag("--model-only", model_only, "Skip the Monte Carlo columns");
  auto* psd = app.add_subcommand("psd", "T1 series, PSD estimate and power-law fit");
  psd->add_option("--input", input, "T1 series CSV (time_s, t1_s); synthesized when absent");
  auto* gst = app.add_subcommand("gst-fcl", "Clifford fidelity from a five-gate PTM set");
  gst->add_option("gateset", gateset, "Gate set JSON {label: 16 row-major floats}")->required();
  gst->add_flag("--literal-negatives", literal, "Use the X90 / Y90 matrices verbatim for mX90 / mY90");
  auto* timing = app.add_subcommand("timing", "Per-iteration time breakdown");
  timing->add_option("--n-cl", n_cl, "Sequence length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*tuneup) return cmd_tuneup(g, n_params, starts);
    if (*landscape) return cmd_landscape(g, n_cl);
    if (*rb) return cmd_rb(g, n_cl_list, reps);
    if (*snr) return cmd_snr(g, model_only);
    if (*psd) return cmd_psd(g, input);
    if (*gst) return cmd_gst(g, gateset, literal);
    if (*timing) return cmd_timing(g, n_cl);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return kConfig;
  } catch (const FitFailure& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kFit;
  } catch (const IoFailure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kSimulation;
  }
  return kUsage;
}
