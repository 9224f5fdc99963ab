#include "carma_cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "carma/error.hpp"
#include "carma/noise.hpp"
#include "carma/parallel.hpp"
#include "carma/polyalg.hpp"
#include "carma/spectral.hpp"
#include "carma/statespace.hpp"
#include "carma/stats.hpp"

namespace carma::cli {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) fail(ErrorCode::internal, file + ": row width does not match the header");
  rows.push_back(std::move(row));
}

void Table::write(const std::string& dir) const {
  const auto path = std::filesystem::path(dir) / file;
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::config, "cannot write " + path.string());
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  }
}

namespace {

std::string str(long v) { return std::to_string(v); }

unsigned threads_of(const Scenario& s) { return s.threads ? s.threads : default_thread_count(); }

double max_modulus_zero(const SpectrumOfP& sp) { return sp.max_modulus(); }

nlohmann::json spectrum_json(const SpectrumOfP& sp) {
  nlohmann::json zs = nlohmann::json::array();
  for (const auto& z : sp.zeros)
    zs.push_back({{"re", z.value.real()}, {"im", z.value.imag()}, {"multiplicity", z.multiplicity}});
  return {{"zeros", zs}, {"causal", sp.causal}, {"min_abs_real", sp.min_abs_real()}, {"max_modulus", max_modulus_zero(sp)}};
}

ElementarySet set_param(const Scenario& s, const std::string& key, Interval fallback) {
  const auto v = s.numbers(key, {fallback.a, fallback.b});
  if (v.size() != 2) fail(ErrorCode::config, "params." + key + " must be [a, b]");
  return ElementarySet::interval(v[0], v[1]);
}

ContentSampler content_sampler(const Scenario& s, double from, double to, double step) {
  ContentSampler cs;
  cs.grid = TimeGrid::span(s.number("content_from", from), s.number("content_to", to), s.number("content_step", step));
  cs.edge_tolerance = s.number("edge_tolerance", 0.05);
  cs.threads = threads_of(s);
  return cs;
}

// ---------------------------------------------------------------------------

ExperimentResult kernel_experiment(const Scenario& s) {
  const auto& pq = s.require_model();
  const auto sp = spectrum(pq);
  const auto ke = kernel_expansion(pq, sp);
  const double t0 = s.number("t0", -2.0);
  const double step = s.number("step", 0.05);
  const long count = s.integer("count", 201);
  FftOracleOptions opts;
  opts.tolerance = s.number("tolerance", 1e-8);
  const auto fft = kernel_fft_oracle(pq, t0, step, static_cast<int>(count), opts);

  ExperimentResult r;
  Table tab{"kernel.csv", {"t", "i", "j", "h_residue", "h_fft", "abs_diff", "fft_truncation_estimate"}, {}};
  double worst = 0.0;
  for (long k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    // the FFT returns the jump midpoint at t = 0 while h(0) = 0 by convention
    if (std::abs(t) < 1e-12) continue;
    const Mat h = kernel_eval(ke, t);
    for (int i = 0; i < pq.d; ++i)
      for (int j = 0; j < pq.d; ++j) {
        const double diff = std::abs(h(i, j) - fft.values[k](i, j));
        worst = std::max(worst, diff);
        tab.add({fmt(t), str(i), str(j), fmt(h(i, j)), fmt(fft.values[k](i, j)), fmt(diff), fmt(fft.truncation_estimate)});
      }
  }
  r.tables.push_back(std::move(tab));
  r.budgets = {{"fft_tolerance", opts.tolerance},
               {"fft_truncation_estimate", fft.truncation_estimate},
               {"fft_max_frequency", fft.max_frequency},
               {"fft_time_step", fft.time_step},
               {"fft_points", fft.points},
               {"spectrum", spectrum_json(sp)}};
  r.summary.push_back("max |h_residue - h_fft| = " + fmt(worst));
  return r;
}

ExperimentResult consistency_experiment(const Scenario& s) {
  const auto& pq = s.require_model();
  const auto sp = spectrum(pq);
  const auto ss = build_state_space(pq);
  ExperimentResult r;
  Table tab{"consistency.csv", {"t", "deviation", "tolerance", "exp_norm"}, {}};
  double worst = 0.0;
  for (double t : s.numbers("times", {-2.0, -1.0, 0.0, 0.5, 1.0, 5.0})) {
    const Mat E = expm(ss.A, t);
    const Mat lhs = E.topRows(pq.d) * ss.beta;
    const double dev = (lhs - contour_side(pq, sp, t)).norm();
    const double tol = 1e-9 * (1.0 + E.norm());
    worst = std::max(worst, dev);
    tab.add({fmt(t), fmt(dev), fmt(tol), fmt(E.norm())});
  }
  r.tables.push_back(std::move(tab));
  r.summary.push_back("max state-space deviation = " + fmt(worst));
  r.budgets = {{"spectrum", spectrum_json(sp)}, {"spectrum_match_distance", spectrum_match_distance(ss, sp)}};
  if (sp.causal) {
    const double from = s.number("u_from", 0.01);
    const double to = s.number("u_to", 10.0);
    const long n = s.integer("u_count", 200);
    std::vector<double> u(n);
    for (long k = 0; k < n; ++k) u[k] = from + (to - from) * static_cast<double>(k) / static_cast<double>(std::max(1L, n - 1));
    const double dev = causal_kernel_identity_check(pq, u);
    Table causal{"causal_identity.csv", {"u_from", "u_to", "u_count", "max_deviation", "tolerance"}, {}};
    causal.add({fmt(from), fmt(to), str(n), fmt(dev), fmt(1e-8)});
    r.tables.push_back(std::move(causal));
    r.summary.push_back("causal kernel identity deviation = " + fmt(dev));
  }
  return r;
}

ExperimentResult spectral_levy_experiment(const Scenario& s) {
  const auto& L = s.require_driver();
  const TimeGrid grid = s.require_grid().grid();
  const double t = s.number("t", 1.0);
  const auto lambdas = s.numbers("lambdas", {10.0, 50.0, 250.0});
  const long paths = s.integer("paths", 200);
  const double edge = s.number("edge_tolerance", 1e-3);
  if (grid.index_of(t) < 0 || grid.index_of(0.0) < 0) fail(ErrorCode::invalid_parameter, "t and 0 must be grid points");

  std::vector<ApproxWeights> w;
  for (double lam : lambdas) w.push_back(spectral_levy_weights(t, lam, grid, edge));
  const int d = L.d;
  // exact[p][c], approx[p][l][c]
  std::vector<Eigen::VectorXd> exact(paths);
  std::vector<std::vector<Eigen::VectorXd>> approx(paths);
  parallel_for(paths, threads_of(s), [&](std::size_t p) {
    const SamplePath path = simulate_path(L, grid, s.seed, p);
    exact[p] = path.value_at(t);
    for (const auto& wl : w) approx[p].push_back(integrate_against(path, wl.weights));
  });

  ExperimentResult r;
  Table tab{"spectral_levy.csv", {"path", "lambda", "component", "approx", "exact", "abs_error", "truncation_bound"}, {}};
  Table sum{"spectral_levy_summary.csv", {"lambda", "median_abs_error", "median_abs_exact", "truncation_bound"}, {}};
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    std::vector<double> errs, mags;
    for (long p = 0; p < paths; ++p)
      for (int c = 0; c < d; ++c) {
        const double e = std::abs(approx[p][l](c) - exact[p](c));
        errs.push_back(e);
        mags.push_back(std::abs(exact[p](c)));
        tab.add({str(p), fmt(lambdas[l]), str(c), fmt(approx[p][l](c)), fmt(exact[p](c)), fmt(e), fmt(w[l].truncation_bound)});
      }
    const double me = stats::median(errs);
    sum.add({fmt(lambdas[l]), fmt(me), fmt(stats::median(mags)), fmt(w[l].truncation_bound)});
    r.summary.push_back("lambda " + fmt(lambdas[l]) + ": median |approx - L_t| = " + fmt(me));
    r.budgets["edge_weight_bound_lambda_" + fmt(lambdas[l])] = w[l].truncation_bound;
  }
  r.tables.push_back(std::move(tab));
  r.tables.push_back(std::move(sum));
  r.budgets["edge_tolerance"] = edge;
  r.budgets["paths"] = paths;
  return r;
}

ExperimentResult spectral_mcarma_experiment(const Scenario& s) {
  const auto& pq = s.require_model();
  const auto& L = s.require_driver();
  if (L.d != pq.d) fail(ErrorCode::shape_mismatch, "driver and model dimensions differ");
  const TimeGrid grid = s.require_grid().grid();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const double t = s.number("t", 1.0);
  const auto lambdas = s.numbers("lambdas", {10.0, 50.0, 250.0});
  const long paths = s.integer("paths", 200);
  const double edge = s.number("edge_tolerance", 1e-3);
  const double hist = s.number("history_tolerance", 1e-6);

  const auto ma = moving_average_weights(t, grid, ke, hist);
  std::vector<MatrixWeights> w;
  for (double lam : lambdas) w.push_back(spectral_mcarma_weights(t, lam, grid, ke, edge));
  std::vector<Eigen::VectorXd> exact(paths);
  std::vector<std::vector<Eigen::VectorXd>> approx(paths);
  parallel_for(paths, threads_of(s), [&](std::size_t p) {
    const SamplePath path = simulate_path(L, grid, s.seed, p);
    exact[p] = apply_weights(ma, path);
    for (const auto& wl : w) approx[p].push_back(apply_weights(wl, path));
  });

  ExperimentResult r;
  Table tab{"spectral_mcarma.csv",
            {"path", "lambda", "approx_norm", "moving_average_norm", "relative_error", "truncation_bound", "history_bound"},
            {}};
  Table sum{"spectral_mcarma_summary.csv", {"lambda", "median_relative_error", "truncation_bound"}, {}};
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    std::vector<double> rel;
    for (long p = 0; p < paths; ++p) {
      const double nrm = exact[p].norm();
      const double e = nrm > 0.0 ? (approx[p][l] - exact[p]).norm() / nrm : 0.0;
      rel.push_back(e);
      tab.add({str(p), fmt(lambdas[l]), fmt(approx[p][l].norm()), fmt(nrm), fmt(e), fmt(w[l].truncation_bound),
               fmt(ma.truncation_bound)});
    }
    const double me = stats::median(rel);
    sum.add({fmt(lambdas[l]), fmt(me), fmt(w[l].truncation_bound)});
    r.summary.push_back("lambda " + fmt(lambdas[l]) + ": median relative error = " + fmt(me));
    r.budgets["edge_weight_bound_lambda_" + fmt(lambdas[l])] = w[l].truncation_bound;
  }
  r.tables.push_back(std::move(tab));
  r.tables.push_back(std::move(sum));
  r.budgets["history_bound"] = ma.truncation_bound;
  r.budgets["history_tolerance"] = hist;
  r.budgets["edge_tolerance"] = edge;
  return r;
}

ExperimentResult simulate_experiment(const Scenario& s) {
  const auto& pq = s.require_model();
  const auto& L = s.require_driver();
  if (L.d != pq.d) fail(ErrorCode::shape_mismatch, "driver and model dimensions differ");
  const TimeGrid grid = s.require_grid().grid();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const auto times = s.numbers("times", {0.0, 1.0, 2.0});
  const long paths = s.integer("paths", 10);
  const double hist = s.number("history_tolerance", 1e-6);
  std::vector<MatrixWeights> w;
  for (double t : times) w.push_back(moving_average_weights(t, grid, ke, hist));
  std::vector<std::vector<Eigen::VectorXd>> y(paths);
  parallel_for(paths, threads_of(s), [&](std::size_t p) {
    const SamplePath path = simulate_path(L, grid, s.seed, p);
    for (const auto& wt : w) y[p].push_back(apply_weights(wt, path));
  });
  ExperimentResult r;
  Table tab{"simulate.csv", {"path", "t", "component", "value", "history_bound"}, {}};
  for (long p = 0; p < paths; ++p)
    for (std::size_t k = 0; k < times.size(); ++k)
      for (int c = 0; c < pq.d; ++c) tab.add({str(p), fmt(times[k]), str(c), fmt(y[p][k](c)), fmt(w[k].truncation_bound)});
  r.tables.push_back(std::move(tab));
  // Driver paths L_t - L_0 at every stride-th grid point, for the first few paths.
  const long exported = std::min(paths, s.integer("export_driver_paths", 0));
  if (exported > 0) {
    const long stride = std::max(1L, s.integer("export_stride", 1));
    Table drv{"driver_paths.csv", {"path", "t", "component", "value"}, {}};
    for (long p = 0; p < exported; ++p) {
      const SamplePath path = simulate_path(L, grid, s.seed, p);
      const long k0 = grid.index_of(0.0);
      std::vector<Eigen::VectorXd> cum(grid.cells + 1, Eigen::VectorXd::Zero(L.d));
      for (long k = 0; k < grid.cells; ++k) cum[k + 1] = cum[k] + path.increment(k);
      const Eigen::VectorXd origin = k0 >= 0 ? cum[k0] : Eigen::VectorXd(cum[0]);
      for (long k = 0; k <= grid.cells; k += stride)
        for (int c = 0; c < L.d; ++c) drv.add({str(p), fmt(grid.t(k)), str(c), fmt(cum[k](c) - origin(c))});
    }
    r.tables.push_back(std::move(drv));
  }
  double hb = 0.0;
  for (const auto& wt : w) hb = std::max(hb, wt.truncation_bound);
  r.budgets = {{"history_bound", hb}, {"history_tolerance", hist}, {"paths", paths}};
  r.summary.push_back("simulated " + str(paths) + " paths at " + str(static_cast<long>(times.size())) + " times");
  return r;
}

ExperimentResult noise_experiment(const Scenario& s) {
  const auto& L = s.require_driver();
  const double t = s.number("t", 1.0);
  ExperimentResult r;
  Table tab{"noise_analytics.csv", {"quantity", "parameter", "value", "verdict", "error_bound", "truncation"}, {}};
  const double c = c_of_t(t);
  const double grid_c = c_of_t_grid_search(t);
  tab.add({"c_of_t", "t=" + fmt(t), fmt(c), "", fmt(std::abs(c - grid_c)), "grid mu in (0,100]"});
  for (double beta : s.numbers("betas", {1.0})) tab.add({"eta_of_t", "t=" + fmt(t) + ";beta=" + fmt(beta), fmt(eta_of_t(t, beta)), "", "0", ""});
  const auto deltas = s.numbers("deltas", {1.0, 1.5});
  for (double delta : deltas)
    if (delta > 1.0) {
      const double a = C_of_delta(delta, t);
      tab.add({"C_of_delta", "delta=" + fmt(delta) + ";t=" + fmt(t), fmt(a), "", fmt(std::abs(a - C_of_delta_richardson(delta, t))), "tail extrapolated"});
    }
  if (L.has_jumps()) {
    const auto R = s.numbers("truncations", {1e2, 1e3, 1e4, 1e5});
    for (double delta : deltas) {
      const auto rep = nu_Zt_delta_integral(delta, t, L, R);
      for (std::size_t k = 0; k < R.size(); ++k)
        tab.add({"nu_Zt_delta_truncated", "delta=" + fmt(delta), fmt(rep.truncated_values[k]), "", "", "R=" + fmt(R[k])});
      tab.add({"nu_Zt_delta_integral", "delta=" + fmt(delta), fmt(rep.value), to_string(rep.verdict), fmt(rep.error_bound), "R=inf"});
      tab.add({"nu_Zt_delta_upper_bound", "delta=" + fmt(delta), fmt(rep.upper_bound), "", "", ""});
      tab.add({"nu_Zt_delta_lower_bound", "delta=" + fmt(delta), fmt(rep.lower_bound), "", "", ""});
      r.summary.push_back("delta " + fmt(delta) + ": " + to_string(rep.verdict) + " (" + fmt(rep.value) + ")");
    }
    for (double eps : s.numbers("tail_eps", {1.0, 0.1, 0.01}))
      tab.add({"nu_Zt_tail_mass", "eps=" + fmt(eps), fmt(nu_Zt_tail_mass(eps, t, L)), "", "", "tail extrapolated"});
  }
  r.tables.push_back(std::move(tab));
  r.budgets = {{"t", t}};
  return r;
}

ExperimentResult tail_experiment(const Scenario& s) {
  const auto& pq = s.require_model();
  const auto& L = s.require_driver();
  if (L.d != 1 || pq.d != 1) fail(ErrorCode::unsupported_model, "tail-estimate is implemented for d = 1");
  const TimeGrid grid = s.require_grid().grid();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const long n = s.integer("samples", 10000);
  const long k = s.integer("k", std::max(10L, n / 100));
  const double t = s.number("t", 1.0);
  const double hist = s.number("history_tolerance", 1e-6);
  const auto ma = moving_average_weights(t, grid, ke, hist);
  std::vector<double> y(n);
  parallel_for(n, threads_of(s), [&](std::size_t p) {
    y[p] = apply_weights(ma, simulate_path(L, grid, s.seed, p))(0);
  });
  const ContentSampler cs = content_sampler(s, -32.0, 32.0, 0.125);
  const auto m = sample_content(ElementarySet::interval(0.0, 1.0), L, static_cast<int>(n), s.seed, cs,
                                static_cast<std::uint64_t>(n));
  std::vector<double> re(n);
  for (long i = 0; i < n; ++i) re[i] = m[i](0);
  ExperimentResult r;
  Table tab{"tail_estimate.csv", {"quantity", "n", "k", "hill_estimate", "nominal_index", "truncation_bound"}, {}};
  const double hy = hill_tail_index(y, static_cast<int>(k));
  const double hm = hill_tail_index(re, static_cast<int>(k));
  tab.add({"abs_Y_t", str(n), str(k), fmt(hy), fmt(L.tail_index()), fmt(ma.truncation_bound)});
  tab.add({"abs_Re_M_0_1", str(n), str(k), fmt(hm), fmt(L.tail_index()), fmt(1.0 / (M_PI * std::min(-cs.grid.start(), cs.grid.end())))});
  r.tables.push_back(std::move(tab));
  r.summary.push_back("Hill |Y_t| = " + fmt(hy) + ", Hill |Re M([0,1))| = " + fmt(hm));
  r.budgets = {{"history_bound", ma.truncation_bound}, {"samples", n}, {"k", k}};
  return r;
}

ExperimentResult dependence_experiment(const Scenario& s) {
  const auto& L = s.require_driver();
  const ElementarySet A1 = set_param(s, "A1", {0.0, 1.0});
  const ElementarySet A2 = set_param(s, "A2", {1.0, 2.0});
  const long n = s.integer("n", 5000);
  const long perms = s.integer("permutations", 1000);
  const double tau = s.number("tau", M_PI);
  const ContentSampler cs = content_sampler(s, -128.0, 128.0, 0.125);
  const auto rep = dependence_diagnostic(A1, A2, L, static_cast<int>(n), s.seed, cs, static_cast<int>(perms), tau);
  ExperimentResult r;
  Table tab{"dependence.csv",
            {"n", "permutations", "dcor", "dcor_p_value", "independence_rejected_at_0.01", "pearson", "ks_statistic", "ks_p_value", "tau"},
            {}};
  tab.add({str(n), str(perms), fmt(rep.dcor), fmt(rep.dcor_p_value), rep.independence_rejected ? "true" : "false",
           fmt(rep.pearson), fmt(rep.ks_statistic), fmt(rep.ks_p_value), fmt(tau)});
  r.tables.push_back(std::move(tab));
  r.summary.push_back("dCor = " + fmt(rep.dcor) + ", permutation p = " + fmt(rep.dcor_p_value) +
                      (rep.independence_rejected ? " (independence rejected)" : " (not rejected)"));
  r.budgets = {{"content_grid", {{"from", cs.grid.start()}, {"to", cs.grid.end()}, {"step", cs.grid.step}}},
               {"edge_tolerance", cs.edge_tolerance}};
  return r;
}

}  // namespace

ExperimentResult run_experiment(const Scenario& s) {
  const std::string& e = s.experiment;
  if (e == "kernel") return kernel_experiment(s);
  if (e == "consistency") return consistency_experiment(s);
  if (e == "spectral-levy") return spectral_levy_experiment(s);
  if (e == "spectral-mcarma") return spectral_mcarma_experiment(s);
  if (e == "simulate") return simulate_experiment(s);
  if (e == "noise-analytics") return noise_experiment(s);
  if (e == "tail-estimate") return tail_experiment(s);
  if (e == "dependence") return dependence_experiment(s);
  fail(ErrorCode::config, "unknown experiment " + e);
}

nlohmann::json validate_scenario(const Scenario& s) {
  nlohmann::json rep;
  rep["experiment"] = s.experiment;
  rep["seed"] = s.seed;
  nlohmann::json budgets = nlohmann::json::object();
  std::optional<KernelExpansion> ke;
  if (s.model) {
    const auto sp = spectrum(*s.model);  // throws inadmissible_model with the offending zero
    rep["spectrum"] = spectrum_json(sp);
    ke = kernel_expansion(*s.model, sp);
    rep["kernel_decay_rate"] = ke->decay_rate();
  }
  if (s.driver) rep["driver"] = driver_to_json(*s.driver);
  const int d = s.driver ? s.driver->d : (s.model ? s.model->d : 1);
  const unsigned threads = threads_of(s);
  if (s.grid) {
    const TimeGrid g = s.grid->grid();
    budgets["grid_cells"] = g.cells;
    budgets["memory_estimate_bytes"] = static_cast<double>(g.cells) * d * sizeof(double) * (threads + 1);
    const double t = s.number("t", 1.0);
    if (s.experiment == "spectral-levy") {
      for (double lam : s.numbers("lambdas", {10.0, 50.0, 250.0}))
        budgets["edge_weight_bound_lambda_" + fmt(lam)] =
            spectral_levy_weights(t, lam, g, s.number("edge_tolerance", 1e-3)).truncation_bound;
    }
    if (ke && (s.experiment == "spectral-mcarma" || s.experiment == "simulate" || s.experiment == "tail-estimate"))
      budgets["history_bound"] = moving_average_weights(t, g, *ke, s.number("history_tolerance", 1e-6)).truncation_bound;
    if (ke && s.experiment == "spectral-mcarma") {
      for (double lam : s.numbers("lambdas", {10.0, 50.0, 250.0}))
        budgets["edge_weight_bound_lambda_" + fmt(lam)] =
            spectral_mcarma_weights(t, lam, g, *ke, s.number("edge_tolerance", 1e-3)).truncation_bound;
    }
  }
  if (s.experiment == "tail-estimate" || s.experiment == "dependence") {
    const ContentSampler cs = s.experiment == "dependence" ? content_sampler(s, -128.0, 128.0, 0.125)
                                                           : content_sampler(s, -32.0, 32.0, 0.125);
    const double edge = std::min(-cs.grid.start(), cs.grid.end());
    const double bound = edge > 0.0 ? 1.0 / (M_PI * edge) : INFINITY;
    if (bound > cs.edge_tolerance)
      fail(ErrorCode::truncation_budget, "content grid edge bound " + fmt(bound) + " exceeds " + fmt(cs.edge_tolerance));
    budgets["content_edge_bound"] = bound;
    budgets["memory_estimate_bytes"] = static_cast<double>(cs.grid.cells) * d * sizeof(double) * (threads + 1);
  }
  if (s.experiment == "noise-analytics") {
    s.require_driver();
    budgets["delta_truncations"] = s.numbers("truncations", {1e2, 1e3, 1e4, 1e5});
  }
  if (s.experiment == "kernel" || s.experiment == "consistency") s.require_model();
  if (s.experiment == "kernel") budgets["fft_tolerance"] = s.number("tolerance", 1e-8);
  rep["budgets"] = budgets;
  rep["status"] = "OK";
  return rep;
}

}  // namespace carma::cli
