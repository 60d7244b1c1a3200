// ddsa: batch front end for decision-dependent stochastic approximation
// studies. Subcommands load a key-value config, run the requested study and
// write reproducible CSV/JSON reports plus a run manifest.
//
// Exit codes: 0 pass, 2 gate failure, 3 input error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ddsa/config.hpp"
#include "ddsa/covariance.hpp"
#include "ddsa/csv.hpp"
#include "ddsa/equilibrium.hpp"
#include "ddsa/errors.hpp"
#include "ddsa/montecarlo.hpp"
#include "ddsa/parallel.hpp"
#include "ddsa/tilt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ddsa;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitPass = 0;
constexpr int kExitGateFail = 2;
constexpr int kExitInputError = 3;
constexpr int kExitNumericalError = 4;

struct RunContext {
  Config config;
  fs::path out_dir;
  int workers = 1;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path path(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name));
    if (!out) throw InputError("cannot write output file '" + name + "'");
    out << text << '\n';
  }

  void write_manifest(std::uint64_t master_seed, const json& tolerances) {
    json snapshot = json::object();
    for (const auto& [key, value] : config.entries()) snapshot[key] = value;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{
        {"tool_version", kToolVersion}, {"config", snapshot},
        {"master_seed", master_seed},   {"tolerances", tolerances},
        {"outputs", outputs},           {"wall_time_seconds", wall},
    };
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
};

RunContext make_context(const std::string& config_path, const std::string& out_dir, int workers,
                        const std::vector<std::string>& overrides) {
  RunContext ctx;
  ctx.config = config_path.empty() ? Config::from_string("") : Config::from_file(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw InputError("override '" + kv + "' is not of the form key=value");
    ctx.config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  ctx.out_dir = out_dir;
  fs::create_directories(ctx.out_dir);
  ctx.workers = workers > 0 ? workers : default_workers();
  return ctx;
}

Vector initial_point(const Config& cfg, int dimension) {
  if (cfg.has("run.x0")) return cfg.get_vector("run.x0");
  return Vector::Zero(dimension);
}

void write_deviations_csv(RunContext& ctx, const std::string& name, const Matrix& rows) {
  CsvWriter csv(ctx.path(name).string());
  std::vector<std::string> header{"replica"};
  for (Eigen::Index c = 0; c < rows.cols(); ++c) header.push_back("dev_" + std::to_string(c));
  csv.row(header);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    csv.field(static_cast<std::int64_t>(r));
    for (Eigen::Index c = 0; c < rows.cols(); ++c) csv.field(rows(r, c));
    csv.end_row();
  }
}

void write_density_csv(RunContext& ctx, const std::string& name, const DensityGrid& grid) {
  CsvWriter csv(ctx.path(name).string());
  if (grid.ys.empty()) {
    csv.row({"x", "density"});
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      csv.field(grid.xs[i]);
      csv.field(grid.density(0, static_cast<Eigen::Index>(i)));
      csv.end_row();
    }
    return;
  }
  csv.row({"x", "y", "density"});
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      csv.field(grid.xs[ix]);
      csv.field(grid.ys[iy]);
      csv.field(grid.density(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)));
      csv.end_row();
    }
  }
}

void write_ellipses_csv(RunContext& ctx, const std::string& name, const Matrix& cov) {
  CsvWriter csv(ctx.path(name).string());
  csv.row({"level", "x", "y"});
  for (double level : coverage_levels()) {
    const Matrix boundary = ellipse_boundary(cov, level);
    for (Eigen::Index i = 0; i < boundary.rows(); ++i) {
      csv.field(level);
      csv.field(boundary(i, 0));
      csv.field(boundary(i, 1));
      csv.end_row();
    }
  }
}

// Exact normal density of N(0, cov) on the same grid layout the KDE uses.
void write_gaussian_density_csv(RunContext& ctx, const std::string& name, const Matrix& cov,
                                const DensityGrid& like) {
  CsvWriter csv(ctx.path(name).string());
  csv.row({"x", "y", "density"});
  Eigen::LLT<Matrix> llt(cov);
  const double norm = 1.0 / (2.0 * 3.14159265358979323846 * std::sqrt(cov.determinant()));
  for (std::size_t iy = 0; iy < like.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < like.xs.size(); ++ix) {
      Vector v(2);
      v << like.xs[ix], like.ys[iy];
      csv.field(like.xs[ix]);
      csv.field(like.ys[iy]);
      csv.field(norm * std::exp(-0.5 * v.dot(llt.solve(v))));
      csv.end_row();
    }
  }
}

struct McGates {
  double rel_op_error;
  double coverage_low;
  double coverage_high;
};

McGates gates_from_config(const Config& cfg) {
  return {cfg.get_double_or("mc.rel-op-error", 0.25),
          cfg.get_double_or("mc.coverage-low", 0.84),
          cfg.get_double_or("mc.coverage-high", 0.96)};
}

// Shared by `mc` and `reproduce`: equilibrium, covariance prediction,
// replica batch, normality statistics and all plot-ready files.
int run_mc_study(RunContext& ctx, const Problem& problem, const StepSchedule& schedule,
                 std::int64_t horizon, std::int64_t replicas, std::uint64_t seed,
                 const std::vector<std::int64_t>& checkpoints, const std::string& prefix,
                 bool gate, json& summary) {
  EquilibriumOptions eq_opts;
  eq_opts.outer_tol = ctx.config.get_double_or("tolerances.outer", 1e-9);
  eq_opts.inner_tol = ctx.config.get_double_or("tolerances.inner", 1e-12);
  const auto equilibrium =
      find_equilibrium(problem, initial_point(ctx.config, problem.dimension()), eq_opts);
  const auto covariance = covariance_report(problem, equilibrium);

  const Vector x0 = initial_point(ctx.config, problem.dimension());
  auto batch = run_replicas(problem, x0, schedule, horizon, replicas, seed, equilibrium.x_star,
                            checkpoints, ctx.workers);
  const auto normality = normality_check(batch, covariance.asymptotic);

  ctx.write_text(prefix + "equilibrium.json", to_json(equilibrium));
  ctx.write_text(prefix + "covariance.json", to_json(covariance));
  ctx.write_text(prefix + "normality.json", to_json(normality));
  write_deviations_csv(ctx, prefix + "deviations.csv", batch.deviations);
  write_matrix_csv(ctx.path(prefix + "target_covariance.csv").string(), {"c0", "c1"},
                   covariance.asymptotic);
  write_matrix_csv(ctx.path(prefix + "empirical_covariance.csv").string(), {"c0", "c1"},
                   normality.empirical_covariance);
  if (problem.dimension() == 2) {
    write_ellipses_csv(ctx, prefix + "ellipses.csv", covariance.asymptotic);
    const auto pair = density_grid(batch.deviations, {0, 1}, std::nullopt, 81);
    write_density_csv(ctx, prefix + "density_empirical.csv", pair);
    write_gaussian_density_csv(ctx, prefix + "density_gaussian.csv", covariance.asymptotic, pair);
  }
  for (int c = 0; c < problem.dimension(); ++c) {
    write_density_csv(ctx, prefix + "density_margin" + std::to_string(c) + ".csv",
                      density_grid(batch.deviations, {c}));
  }
  if (checkpoints.size() >= 3 && replicas >= 30) {
    const auto fit = rate_fit(batch, schedule);
    CsvWriter csv(ctx.path(prefix + "rate.csv").string());
    csv.row({"t", "eta", "mean_sq_dist"});
    for (const auto& pt : fit.points) {
      csv.field(pt.t);
      csv.field(pt.eta);
      csv.field(pt.mean_sq_dist);
      csv.end_row();
    }
    summary["rate_slope"] = fit.slope;
  }

  const McGates gates = gates_from_config(ctx.config);
  const double cov90 = normality.coverage.at(0.9);
  const bool pass = normality.relative_operator_error < gates.rel_op_error &&
                    cov90 >= gates.coverage_low && cov90 <= gates.coverage_high;
  summary["relative_operator_error"] = normality.relative_operator_error;
  summary["coverage_0.9"] = cov90;
  summary["mean_deviation_norm"] = normality.mean_deviation_norm;
  summary["pass"] = pass;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << prefix
            << "rel-op-error=" << normality.relative_operator_error << " (< "
            << gates.rel_op_error << ")  coverage(0.9)=" << cov90 << " (in ["
            << gates.coverage_low << ", " << gates.coverage_high << "])\n";
  return (gate && !pass) ? kExitGateFail : kExitPass;
}

int cmd_equilibrium(const std::string& config_path, const std::string& out_dir, int workers,
                    const std::vector<std::string>& overrides) {
  RunContext ctx = make_context(config_path, out_dir, workers, overrides);
  const Problem problem = problem_from_config(ctx.config);
  EquilibriumOptions opts;
  opts.outer_tol = ctx.config.get_double_or("tolerances.outer", 1e-9);
  opts.inner_tol = ctx.config.get_double_or("tolerances.inner", 1e-12);
  const auto report =
      find_equilibrium(problem, initial_point(ctx.config, problem.dimension()), opts);
  ctx.write_text("equilibrium.json", to_json(report));

  const auto audit = audit_assumptions(problem, report.x_star, 0.5, 64,
                                       ctx.config.get_u64_or("run.seed", 20260810));
  json audit_json{{"alpha_estimate", audit.alpha_estimate},
                  {"beta_estimate", audit.beta_estimate},
                  {"gamma_estimate", audit.gamma_estimate},
                  {"gamma_is_heuristic", audit.gamma_is_heuristic},
                  {"variance_bound_estimate", audit.variance_bound_estimate},
                  {"probe_count", audit.probe_count}};
  ctx.write_text("audit.json", audit_json.dump(2));

  std::cout << "x* = [" << report.x_star.transpose()
            << "], contraction ratio = " << report.observed_contraction_ratio
            << ", residual = " << report.residual_norm << "\n";
  ctx.write_manifest(ctx.config.get_u64_or("run.seed", 20260810),
                     json{{"outer", opts.outer_tol}, {"inner", opts.inner_tol}});
  return kExitPass;
}

int cmd_mc(const std::string& config_path, const std::string& out_dir, int workers,
           const std::vector<std::string>& overrides) {
  RunContext ctx = make_context(config_path, out_dir, workers, overrides);
  const Problem problem = problem_from_config(ctx.config);
  const StepSchedule schedule = schedule_from_config(ctx.config);
  const std::int64_t horizon = ctx.config.get_int_or("run.T", 100000);
  const std::int64_t replicas = ctx.config.get_int_or("run.R", 200);
  const std::uint64_t seed = ctx.config.get_u64_or("run.seed", 20260810);
  std::vector<std::int64_t> checkpoints;
  if (ctx.config.has("run.checkpoints")) checkpoints = ctx.config.get_int_list("run.checkpoints");

  json summary;
  const int rc = run_mc_study(ctx, problem, schedule, horizon, replicas, seed, checkpoints, "",
                              true, summary);
  ctx.write_text("summary.json", summary.dump(2));
  const McGates gates = gates_from_config(ctx.config);
  ctx.write_manifest(seed, json{{"rel-op-error", gates.rel_op_error},
                                {"coverage", {gates.coverage_low, gates.coverage_high}}});
  return rc;
}

int cmd_reproduce(const std::string& scale, const std::string& out_dir, int workers,
                  std::uint64_t seed, const std::vector<std::string>& overrides) {
  if (scale != "desk" && scale != "full")
    throw InputError("--scale must be 'desk' or 'full'");
  RunContext ctx = make_context("", out_dir, workers, overrides);
  const bool desk = scale == "desk";
  const std::vector<double> rhos =
      desk ? std::vector<double>{0.25, 0.5} : std::vector<double>{0.25, 0.5, 0.9};
  const std::int64_t horizon = desk ? 100000 : 1000000;
  const std::int64_t replicas = desk ? 200 : 400;

  json summary;
  summary["scale"] = scale;
  int rc = kExitPass;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    const Problem problem = Problem::swap_gaussian(rho);
    const StepSchedule schedule(1.0, 0.75);
    std::string prefix = "rho-" + std::to_string(rho).substr(0, 4) + "_";
    // the slow-mixing rho = 0.9 column is reported, not gated; the averaged
    // CLT needs far more than these horizons through the 0.1 eigenvalue of W
    const bool gate = rho < 0.9;
    json entry;
    ctx.config.set("run.x0", "5,5");
    const int one = run_mc_study(ctx, problem, schedule, horizon, replicas,
                                 splitmix64_at(seed, i), {}, prefix, gate, entry);
    summary[prefix + "report"] = entry;
    rc = std::max(rc, one);
  }
  ctx.write_text("summary.json", summary.dump(2));
  ctx.write_manifest(seed, json{{"rel-op-error", gates_from_config(ctx.config).rel_op_error}});
  return rc;
}

int cmd_lan(const std::string& config_path, const std::string& out_dir, int workers,
            const std::string& u_str, std::int64_t k, std::int64_t replicas,
            const std::vector<std::string>& overrides) {
  RunContext ctx = make_context(config_path, out_dir, workers, overrides);
  const Problem problem = problem_from_config(ctx.config);
  const StepSchedule schedule = schedule_from_config(ctx.config);
  Config u_cfg = Config::from_string("u = " + u_str);
  const Vector u = u_cfg.get_vector("u");
  const std::uint64_t seed = ctx.config.get_u64_or("run.seed", 20260810);

  LanOptions opts;
  opts.workers = ctx.workers;
  const auto report =
      lan_statistic(problem, TiltSpec::canonical(u), u, k, schedule,
                    initial_point(ctx.config, problem.dimension()), replicas, seed, opts);
  ctx.write_text("lan.json", to_json(report));
  {
    CsvWriter csv(ctx.path("lan_samples.csv").string());
    std::vector<std::string> header{"replica"};
    for (int c = 0; c < problem.dimension(); ++c) header.push_back("z_" + std::to_string(c));
    header.push_back("log_lr");
    csv.row(header);
    for (Eigen::Index r = 0; r < report.z_samples.rows(); ++r) {
      csv.field(static_cast<std::int64_t>(r));
      for (Eigen::Index c = 0; c < report.z_samples.cols(); ++c)
        csv.field(report.z_samples(r, c));
      csv.field(report.log_lr(r));
      csv.end_row();
    }
  }

  bool pass;
  if (u.isZero(0.0)) {
    pass = report.log_lr.cwiseAbs().maxCoeff() == 0.0;
  } else {
    pass = std::abs(report.observed_mean - report.predicted_mean) <= 3.0 * report.se_mean &&
           std::abs(report.observed_variance - report.predicted_variance) <=
               3.0 * report.se_variance;
  }
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "lan mean=" << report.observed_mean
            << " (predicted " << report.predicted_mean << " +- " << 3 * report.se_mean
            << "), variance=" << report.observed_variance << " (predicted "
            << report.predicted_variance << " +- " << 3 * report.se_variance << ")\n";
  ctx.write_manifest(seed, json{{"se_mean", report.se_mean},
                                {"se_variance", report.se_variance},
                                {"tilt", json::parse(to_json(TiltSpec::canonical(u)))}});
  return pass ? kExitPass : kExitGateFail;
}

int cmd_shift(const std::string& config_path, const std::string& out_dir, int workers,
              const std::string& u_norms_str, const std::string& u_dir_str, std::int64_t samples,
              const std::vector<std::string>& overrides) {
  RunContext ctx = make_context(config_path, out_dir, workers, overrides);
  const Problem problem = problem_from_config(ctx.config);
  Config aux = Config::from_string("norms = " + u_norms_str + "\ndir = " + u_dir_str);
  const Vector norms_vec = aux.get_vector("norms");
  const Vector dir = aux.get_vector("dir");
  std::vector<double> norms(norms_vec.data(), norms_vec.data() + norms_vec.size());

  TiltedEquilibriumOptions opts;
  opts.samples = samples;
  opts.seed = ctx.config.get_u64_or("run.seed", 20260810);
  const auto table =
      equilibrium_shift_check(problem, TiltSpec::canonical(Vector::Zero(dir.size())), norms, dir,
                              initial_point(ctx.config, problem.dimension()), opts);
  ctx.write_text("shift.json", to_json(table));
  {
    CsvWriter csv(ctx.path("shift.csv").string());
    csv.row({"u_norm", "ratio", "x_star_u_0", "x_star_u_1"});
    for (const auto& row : table.rows) {
      csv.field(row.u_norm);
      csv.field(row.ratio);
      for (Eigen::Index c = 0; c < row.x_star_u.size() && c < 2; ++c) csv.field(row.x_star_u(c));
      csv.end_row();
    }
  }

  bool pass = true;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    pass = pass && table.rows[i + 1].ratio <= table.rows[i].ratio + 2.0 * table.noise_floor;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "shift ratios:";
  for (const auto& row : table.rows) std::cout << " " << row.ratio;
  std::cout << " (floor " << table.noise_floor << ")\n";
  ctx.write_manifest(opts.seed,
                     json{{"noise_floor", table.noise_floor},
                          {"tilt", json::parse(to_json(TiltSpec::canonical(dir)))}});
  return pass ? kExitPass : kExitGateFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision-dependent stochastic approximation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", scale = "desk";
  std::string u_str = "0,0", u_norms = "0.04,0.02,0.01", u_dir = "1,0";
  int workers = 0;
  std::int64_t k = 10000, replicas = 200, samples = 1000000;
  std::uint64_t seed = 20260810;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("config", config_path, "problem configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--workers", workers, "worker thread count (0 = auto)");
    cmd->add_option("--set", overrides, "config overrides, key=value");
  };

  auto add_override_alias = [&](CLI::App* cmd, const std::string& flag, const std::string& key) {
    cmd->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.push_back(key + "=" + v); },
        "override " + key);
  };

  auto* eq = app.add_subcommand("equilibrium", "solve for the equilibrium point");
  add_common(eq, true);

  auto* mc = app.add_subcommand("mc", "replicated-trajectory normality study");
  add_common(mc, true);
  add_override_alias(mc, "--rho", "problem.rho");
  add_override_alias(mc, "--T", "run.T");
  add_override_alias(mc, "--R", "run.R");
  add_override_alias(mc, "--seed", "run.seed");
  add_override_alias(mc, "--checkpoints", "run.checkpoints");

  auto* rep =
      app.add_subcommand("reproduce", "benchmark covariance study at desk or full scale");
  rep->add_option("--scale", scale, "desk (R=200, T=1e5) or full (R=400, T=1e6)");
  rep->add_option("--seed", seed, "master seed");
  add_common(rep, false);

  auto* lan = app.add_subcommand("lan", "trajectory log-likelihood-ratio statistic");
  add_common(lan, true);
  lan->add_option("--u", u_str, "tilt direction, comma separated")->required();
  lan->add_option("--k", k, "trajectory length");
  lan->add_option("--replicas", replicas, "replica count");

  auto* shift = app.add_subcommand("shift", "perturbed-equilibrium expansion check");
  add_common(shift, true);
  shift->add_option("--u-norms", u_norms, "tilt magnitudes, comma separated, decreasing");
  shift->add_option("--u-dir", u_dir, "tilt direction");
  shift->add_option("--samples", samples, "Monte-Carlo samples per solution-map evaluation");

  try {
    app.parse(argc, argv);
    if (*eq) return cmd_equilibrium(config_path, out_dir, workers, overrides);
    if (*mc) return cmd_mc(config_path, out_dir, workers, overrides);
    if (*rep) return cmd_reproduce(scale, out_dir, workers, seed, overrides);
    if (*lan) return cmd_lan(config_path, out_dir, workers, u_str, k, replicas, overrides);
    if (*shift)
      return cmd_shift(config_path, out_dir, workers, u_norms, u_dir, samples, overrides);
    return kExitInputError;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInputError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}
