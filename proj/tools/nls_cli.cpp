#include <omp.h>

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nls/runio.hpp"

namespace fs = std::filesystem;
using nls::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nls::config_error("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw nls::config_error(std::string("config parse error: ") + e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw nls::error("cannot create output dir: " + dir);
}

json spectrum_json(const nls::CoefficientSpectrum& s) {
  json coeffs = json::array();
  for (int n = -s.n_max; n <= s.n_max; ++n) {
    const nls::cplx g = s.coeff(n);
    if (std::abs(g) > 0.0)
      coeffs.push_back(json::array({n, g.real(), g.imag()}));
  }
  return json{{"d", s.d}, {"n_max", s.n_max}, {"coeffs", coeffs}};
}

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int cmd_coeffs(const json& cfg, const std::string& out_dir) {
  nls::validate_schema(cfg, {{"schema", "integer", false},
                             {"dim", "integer", true},
                             {"nonlinearity", "object", true}},
                       "config");
  const int d = cfg.at("dim").get<int>();
  // Route through the same validated parser as simulate.
  json shim = {{"grid", {{"dim", d}, {"half_width", 1.0}, {"points", 8}}},
               {"nonlinearity", cfg.at("nonlinearity")},
               {"time", {{"t_start", 0.0}, {"t_end", 1.0}}},
               {"initial", {{"family", "zero"}}}};
  const nls::NonlinearitySpec nl = nls::parse_simulation_config(shim).cfg.nl;

  json rep;
  rep["spectrum"] = spectrum_json(nl.spectrum);
  rep["tail_bound"] = nl.spectrum.tail_bound;
  const nls::MuMargin mm = nls::mu_margin(nl.spectrum);
  rep["mu"] = mm.mu;
  rep["imag_g0_warn"] = mm.imag_g0_warn;
  try {
    const nls::DecayFit df = nls::decay_fit(nl.spectrum);
    rep["decay_fit"] = {{"exponent", df.exponent},
                        {"r2", df.r2},
                        {"n_points", df.n_points}};
  } catch (const nls::undersampled_error&) {
    rep["decay_fit"] = nullptr;  // too few active modes; nothing to fit
  }
  rep["polynomial_equivalent"] = nls::polynomial_equivalent(nl);
  rep["config_hash"] = nls::content_hash(cfg);
  nls::write_text(out_dir + "/coeffs.json", rep.dump(2) + "\n");
  return 0;
}

int write_run_outputs(const json& cfg, const nls::Trajectory& tr,
                      const std::string& out_dir, double wall_s,
                      const json* res_check) {
  nls::write_scalars_csv(tr, out_dir + "/scalars.csv");
  json files = json::array({"scalars.csv", "manifest.json"});
  json snaps = json::array();
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04zu.f64", i);
    nls::dump_field(tr.snapshots[i], out_dir + "/" + name);
    snaps.push_back({{"t", tr.snap_times[i]}, {"file", name}});
    files.push_back(name);
  }
  json m = nls::manifest_for(cfg, tr);
  m["snapshots"] = snaps;
  m["files"] = files;
  m["wall_time_s"] = wall_s;
  if (res_check) m["resolution_check"] = *res_check;
  nls::write_text(out_dir + "/manifest.json", m.dump(2) + "\n");
  switch (tr.termination) {
    case nls::Termination::blowup:
      return 3;
    case nls::Termination::domain_overflow:
      return 4;
    case nls::Termination::reached_end:
      break;
  }
  return 0;
}

int cmd_simulate(const json& cfg, const std::string& out_dir,
                 bool resolution_check) {
  const auto t0 = std::chrono::steady_clock::now();
  const nls::ParsedSim ps = nls::parse_simulation_config(cfg);
  const nls::Trajectory tr = nls::run(ps.cfg, ps.u0);

  json rc;
  const json* rc_ptr = nullptr;
  if (resolution_check) {
    nls::SimulationConfig twin = ps.cfg;
    if (twin.fixed_dt)
      twin.dt *= 0.5;
    else
      twin.dt_cap_c *= 0.5;
    const nls::Trajectory tw = nls::run(twin, ps.u0);
    rc["dt_halved"] = true;
    rc["end_time"] = tw.end_time;
    rc["steps"] = tw.steps;
    if (tr.termination == nls::Termination::reached_end &&
        tw.termination == nls::Termination::reached_end &&
        !tr.snapshots.empty() && !tw.snapshots.empty()) {
      nls::Field diff = tr.snapshots.back();
      for (std::size_t k = 0; k < diff.size(); ++k)
        diff.v[k] -= tw.snapshots.back().v[k];
      const double rel =
          nls::l2_norm(diff) / std::max(1e-300, nls::l2_norm(tw.snapshots.back()));
      rc["final_snapshot_rel_l2_diff"] = rel;
    } else {
      rc["final_snapshot_rel_l2_diff"] = nullptr;
    }
    rc_ptr = &rc;
  }
  return write_run_outputs(cfg, tr, out_dir, wall_seconds(t0), rc_ptr);
}

nls::Trajectory load_trajectory(const std::string& run_dir) {
  const json m = load_json(run_dir + "/manifest.json");
  if (!m.contains("snapshots") || !m.at("snapshots").is_array())
    throw nls::config_error("run manifest lists no snapshots");
  nls::Trajectory tr;
  for (const json& s : m.at("snapshots")) {
    tr.snap_times.push_back(s.at("t").get<double>());
    tr.snapshots.push_back(
        nls::load_field(run_dir + "/" + s.at("file").get<std::string>()));
  }
  const std::string term = m.value("termination", "reached_end");
  if (term == "blowup")
    tr.termination = nls::Termination::blowup;
  else if (term == "domain_overflow")
    tr.termination = nls::Termination::domain_overflow;
  else
    tr.termination = nls::Termination::reached_end;
  tr.reason = m.value("reason", "");
  tr.end_time = m.value("end_time", tr.snap_times.empty() ? 0.0 : tr.snap_times.back());
  return tr;
}

int cmd_diagnose(const json& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  nls::validate_schema(cfg, {{"schema", "integer", false},
                             {"run_dir", "string", true},
                             {"classify", "object", false},
                             {"pairings", "boolean", false}},
                       "config");
  const std::string run_dir = cfg.at("run_dir").get<std::string>();
  const nls::Trajectory tr = load_trajectory(run_dir);
  const json run_manifest = load_json(run_dir + "/manifest.json");

  nls::ClassifyConfig cc;
  if (cfg.contains("classify")) {
    const json& jc = cfg.at("classify");
    nls::validate_schema(jc, {{"theta_s", "number", false},
                              {"theta_n", "number", false},
                              {"lambda_free", "number", false},
                              {"lambda_grid_points", "integer", false},
                              {"lambda_grid_span", "number", false},
                              {"t_fit", "number", false},
                              {"probe_xi", "array", false}},
                         "classify");
    cc.theta_s = jc.value("theta_s", cc.theta_s);
    cc.theta_n = jc.value("theta_n", cc.theta_n);
    cc.lambda_free = jc.value("lambda_free", cc.lambda_free);
    cc.lambda_grid_points = jc.value("lambda_grid_points", cc.lambda_grid_points);
    cc.lambda_grid_span = jc.value("lambda_grid_span", cc.lambda_grid_span);
    cc.t_fit = jc.value("t_fit", cc.t_fit);
    if (jc.contains("probe_xi"))
      cc.probe_xi = jc.at("probe_xi").get<std::vector<double>>();
  }

  const nls::Verdict v = nls::classify(tr, cc);
  json vj;
  vj["classification"] = v.classification;
  vj["lambda_hat"] = v.lambda_hat;
  vj["ref_l2"] = v.ref_l2;
  vj["final_rel_distance"] = v.final_rel_distance;
  vj["trend_slope"] = v.trend_slope;
  vj["inf_grid_mean_rel"] = v.inf_grid_mean_rel;
  vj["inf_grid_trend"] = v.inf_grid_trend;
  vj["detail"] = v.detail;
  vj["config_hash"] = nls::content_hash(cfg);
  // The verdict is the primary product; put it on disk before the metric
  // table so a failure there cannot take the verdict down with it.
  nls::write_text(out_dir + "/verdict.json", vj.dump(2) + "\n");

  json files = json::array({"verdict.json", "manifest.json"});
  if (v.classification != "blowup" && v.classification != "inconclusive") {
    // Full metric table against the extracted datum at lambda_hat.
    const nls::ScatteringDatum dat = nls::extract_datum(tr, v.lambda_hat);
    const nls::PhaseCorrection ph = nls::constant_phase(v.lambda_hat);
    const nls::ScatteringMetrics sm = nls::scattering_metrics(tr, dat, ph);

    const std::size_t n = sm.times.size();
    std::vector<nls::cplx> key1(n, nls::cplx(0.0));
    std::vector<double> key2(n, 0.0), key3(n, 0.0), barab(n, 0.0);
    const bool want_pairings = cfg.value("pairings", false);
    if (want_pairings) {
      const nls::NonlinearitySpec nl = nls::parse_simulation_config(
                                           run_manifest.at("config"))
                                           .cfg.nl;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = sm.times[i];
        nls::SampledWindow w;
        for (std::size_t j = 0; j < tr.snap_times.size(); ++j)
          if (tr.snap_times[j] >= t * 0.9999 &&
              tr.snap_times[j] <= 2.0 * t * 1.0001) {
            w.s.push_back(tr.snap_times[j]);
            w.u.push_back(tr.snapshots[j]);
          }
        if (w.s.size() < 16 || w.s.front() > 1.01 * t ||
            w.s.back() < 1.98 * t)
          continue;  // no resolvable window; row keeps zero pairings
        key1[i] = nls::pairing_key1(w, dat, t);
        key2[i] = std::abs(nls::pairing_key2(
            w.u[w.u.size() / 2], w.s[w.s.size() / 2], dat, t,
            w.u.front().grid));
        key3[i] = std::abs(nls::pairing_key3(w, nl.spectrum, dat, t));
        barab[i] = std::abs(nls::barab_pairing(w, dat, t));
      }
    }
    nls::write_diagnostics_csv(sm.times, sm.l2_distance, sm.tail_strichartz,
                               key1, key2, key3, barab,
                               out_dir + "/diagnostics.csv");
    files.push_back("diagnostics.csv");
  }

  json m;
  m["config"] = cfg;
  m["config_hash"] = nls::content_hash(cfg);
  m["tool_version"] = "0.1.0";
  m["files"] = files;
  m["wall_time_s"] = wall_seconds(t0);
  nls::write_text(out_dir + "/manifest.json", m.dump(2) + "\n");
  return 0;
}

int cmd_blowup_sweep(const json& cfg, const std::string& out_dir,
                     bool resolution_check) {
  const auto t0 = std::chrono::steady_clock::now();
  nls::validate_schema(cfg, {{"schema", "integer", false},
                             {"grid", "object", true},
                             {"nonlinearity", "object", true},
                             {"k", "number", true},
                             {"R0", "number", false},
                             {"eps_list", "array", true},
                             {"t_max", "number", false},
                             {"dt_cap_c", "number", false},
                             {"boundary_cap", "number", false},
                             {"blowup_linf", "number", false},
                             {"blowup_mass_factor", "number", false}},
                       "config");
  json shim = {{"grid", cfg.at("grid")},
               {"nonlinearity", cfg.at("nonlinearity")},
               {"time", {{"t_start", 0.0}, {"t_end", 1.0}}},
               {"initial", {{"family", "zero"}}}};
  const nls::ParsedSim base = nls::parse_simulation_config(shim);

  nls::SweepConfig sc;
  sc.grid = base.cfg.grid;
  sc.nl = base.cfg.nl;
  if (!(nls::mu_margin(sc.nl.spectrum).mu > 0.0))
    throw nls::config_error("sweep requires a mu-coercive spectrum (mu > 0)");
  sc.k = cfg.at("k").get<double>();
  sc.R0 = cfg.value("R0", sc.R0);
  sc.eps_list = cfg.at("eps_list").get<std::vector<double>>();
  sc.t_max = cfg.value("t_max", sc.t_max);
  sc.dt_cap_c = cfg.value("dt_cap_c", sc.dt_cap_c);
  sc.boundary_cap = cfg.value("boundary_cap", sc.boundary_cap);
  sc.blowup_linf = cfg.value("blowup_linf", sc.blowup_linf);
  sc.blowup_mass_factor = cfg.value("blowup_mass_factor", sc.blowup_mass_factor);

  const nls::SweepResult res = nls::sweep(sc);
  nls::write_sweep_csv(res, out_dir + "/sweep.csv");

  json fj;
  fj["regime"] = res.fit.regime;
  fj["slope_or_rate"] = res.fit.slope_or_rate;
  fj["target"] = res.fit.target;
  fj["r_squared"] = res.fit.r_squared;
  fj["envelope_C"] = res.fit.envelope_C;
  json files = json::array({"sweep.csv", "fit.json", "manifest.json"});

  if (resolution_check) {
    nls::SweepConfig twin = sc;
    twin.grid = nls::Grid(sc.grid.dim, sc.grid.half_width,
                          sc.grid.points_per_axis * 2);
    const nls::SweepResult rt = nls::sweep(twin);
    nls::write_sweep_csv(rt, out_dir + "/sweep_fine.csv");
    files.push_back("sweep_fine.csv");
    json agree = json::array();
    double worst = 0.0;
    for (std::size_t i = 0;
         i < res.points.size() && i < rt.points.size(); ++i) {
      const nls::SweepPoint& a = res.points[i];
      const nls::SweepPoint& b = rt.points[i];
      json row;
      row["eps"] = a.eps;
      row["t_coarse"] = a.t_detected;
      row["t_fine"] = b.t_detected;
      if (!a.excluded && !b.excluded && a.trigger != "none" &&
          b.trigger != "none" && b.t_detected > 0.0) {
        const double rel = std::abs(a.t_detected - b.t_detected) / b.t_detected;
        row["rel_diff"] = rel;
        worst = std::max(worst, rel);
      }
      agree.push_back(row);
    }
    fj["resolution_check"] = {{"points", agree}, {"worst_rel_diff", worst}};
  }
  fj["config_hash"] = nls::content_hash(cfg);
  nls::write_text(out_dir + "/fit.json", fj.dump(2) + "\n");

  json m;
  m["config"] = cfg;
  m["config_hash"] = nls::content_hash(cfg);
  m["tool_version"] = "0.1.0";
  m["files"] = files;
  m["wall_time_s"] = wall_seconds(t0);
  nls::write_text(out_dir + "/manifest.json", m.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral NLS simulation and diagnostics toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool resolution_check = false;
  app.add_option("--config", config_path, "JSON config path")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "OpenMP thread count (0 = default)");
  app.add_flag("--resolution-check", resolution_check,
               "run a refined twin and report agreement");

  auto* c_coeffs = app.add_subcommand("coeffs", "angular coefficient report");
  auto* c_sim = app.add_subcommand("simulate", "run the split-step evolution");
  auto* c_diag = app.add_subcommand("diagnose", "scattering diagnostics on a run");
  auto* c_sweep = app.add_subcommand("blowup-sweep", "amplitude sweep with fits");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) omp_set_num_threads(threads);

  try {
    ensure_dir(out_dir);
    const json cfg = load_json(config_path);
    if (c_coeffs->parsed()) return cmd_coeffs(cfg, out_dir);
    if (c_sim->parsed()) return cmd_simulate(cfg, out_dir, resolution_check);
    if (c_diag->parsed()) return cmd_diagnose(cfg, out_dir);
    if (c_sweep->parsed()) return cmd_blowup_sweep(cfg, out_dir, resolution_check);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const nls::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nls::domain_overflow_error& e) {
    std::cerr << "domain overflow: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
