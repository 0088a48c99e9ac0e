// fdnoma: outage / throughput / sum-rate sweeps and the MC-vs-closed-form check.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fdnoma/fdnoma.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kSolverFailure = 3 };

struct Flags {
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> draws;
  std::string out;
  std::string grid;
  std::string param;
  std::optional<double> es_grid;
  std::optional<double> eps;
  std::optional<int> max_iter;
  unsigned threads = 0;
  bool corrupt_coefficients = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON parameter file (defaults to the built-in parameter set)");
  cmd->add_option("--mode", f.mode, "run a single mode: fd, hd or oma");
  cmd->add_option("--seed", f.seed, "base seed of the counter-based RNG");
  cmd->add_option("--out", f.out, "output CSV (stdout when omitted)");
  cmd->add_option("--grid", f.grid, "sweep grid start:stop:step");
  cmd->add_option("--param", f.param, "swept parameter: snr_db, beta, K, N, M, lambda_sp, lambda_ps, lambda_sr");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

fdnoma::Config resolve(const Flags& f) {
  fdnoma::Config cfg = f.config.empty() ? fdnoma::Config{} : fdnoma::load_config(f.config);
  fdnoma::SweepSpec s = fdnoma::effective_sweep(cfg);
  if (!f.param.empty()) s.parameter = f.param;
  if (!f.grid.empty()) s.grid = fdnoma::parse_grid(f.grid);
  if (!f.mode.empty()) {
    try {
      s.modes = {fdnoma::parse_mode(f.mode)};
    } catch (const std::invalid_argument& e) {
      throw fdnoma::ConfigError(std::string("--mode: ") + e.what());
    }
  }
  if (f.trials) s.trials = *f.trials;
  if (f.seed) s.seed = *f.seed;
  if (!f.out.empty()) s.output = f.out;
  fdnoma::validate_sweep(s);
  cfg.sweep = s;
  if (f.draws) cfg.sumrate.draws = *f.draws;
  if (f.es_grid) cfg.sumrate.es_grid = *f.es_grid;
  if (f.eps) cfg.sumrate.eps = *f.eps;
  if (f.max_iter) cfg.sumrate.max_iter = *f.max_iter;
  if (cfg.sumrate.draws == 0) throw fdnoma::ConfigError("--draws: must be >= 1");
  if (!(cfg.sumrate.eps > 0)) throw fdnoma::ConfigError("--eps: must be positive");
  if (cfg.sumrate.max_iter < 1) throw fdnoma::ConfigError("--max-iter: must be >= 1");
  return cfg;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    fdnoma::write_file(path, content);
}

/// Quick built-in consistency checks; each prints one line.
int selftest(unsigned threads) {
  using namespace fdnoma;
  int failures = 0;
  auto check = [&](const char* name, bool ok, double value) {
    std::printf("%s %-40s %.9g\n", ok ? "PASS" : "FAIL", name, value);
    if (!ok) ++failures;
  };
  const SystemParams p;
  check("rho FD", std::fabs(effective_rho(p, DuplexMode::FD) - 0.7513305) < 1e-6, effective_rho(p, DuplexMode::FD));
  check("rho HD", std::fabs(effective_rho(p, DuplexMode::HD) - 0.45) < 1e-12, effective_rho(p, DuplexMode::HD));
  const CoefficientTable c = c_coefficients(2, 3);
  check("C_j(l=2, N=3) last entry", std::fabs(c.values.back() - 0.25L) < 1e-15, static_cast<double>(c.values.back()));
  const double e1 = upper_incomplete_gamma_int(0, 1.0);
  check("Gamma(0, 1)", std::fabs(e1 - 0.219383934395520) < 1e-12, e1);
  const OutageEstimate mc = estimate_outage(p, DuplexMode::FD, 200000, 42, {threads});
  const std::vector<double> an = outage_analytic_all(p, DuplexMode::FD);
  for (std::size_t i = 0; i < an.size(); ++i) {
    const std::string name = "FD -9 dB outage " + node_name(i);
    check(name.c_str(), std::fabs(an[i] - mc.probability[i]) <= validation_tolerance(mc.probability[i]), an[i]);
  }
  SystemParams q;
  q.snr_db = -5.0;
  const DrawResult d = optimize_draw(q, DuplexMode::FD, 7, 0);
  bool mono = true;
  for (std::size_t k = 1; k < d.objectives.size(); ++k) mono = mono && d.objectives[k] >= d.objectives[k - 1];
  check("SCA trace nondecreasing", d.status == DrawStatus::Optimized && mono, d.sum_rate);
  return failures == 0 ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FD-NOMA overlay spectrum sharing with SWIPT: Monte Carlo, closed forms and SCA power allocation"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* outage = app.add_subcommand("outage", "outage probability sweep (MC and closed form)");
  CLI::App* throughput = app.add_subcommand("throughput", "delay-limited throughput sweep");
  CLI::App* sumrate = app.add_subcommand("sumrate", "SCA sum-rate optimization over seeded channel draws");
  CLI::App* validate = app.add_subcommand("validate", "compare MC with the closed forms; exit 1 on a gap");
  CLI::App* self = app.add_subcommand("selftest", "built-in consistency checks");
  for (CLI::App* cmd : {outage, throughput, validate}) {
    add_common(cmd, f);
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per grid point");
  }
  add_common(sumrate, f);
  sumrate->add_option("--draws", f.draws, "channel draws per grid point");
  sumrate->add_option("--es-grid", f.es_grid, "exhaustive-search grid step (0 disables)");
  sumrate->add_option("--eps", f.eps, "relative objective tolerance of SCA");
  sumrate->add_option("--max-iter", f.max_iter, "SCA iteration cap");
  validate->get_option("--seed")->required();
  validate->add_flag("--corrupt-coefficients", f.corrupt_coefficients, "negative control: perturb the C_j table");
  self->add_option("--threads", f.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (self->parsed()) return selftest(f.threads);
    const fdnoma::Config cfg = resolve(f);
    fdnoma::RunOptions run;
    run.threads = f.threads;
    run.analytic.corrupt_coefficients = f.corrupt_coefficients;
    const std::string out = cfg.sweep->output;
    if (outage->parsed()) {
      emit(out, fdnoma::run_outage_sweep(cfg, run));
    } else if (throughput->parsed()) {
      emit(out, fdnoma::run_throughput_sweep(cfg, run));
    } else if (sumrate->parsed()) {
      const fdnoma::SumRateReport rep = fdnoma::run_sumrate_sweep(cfg, run);
      if (out.empty()) {
        std::cout << rep.summary;
      } else {
        fdnoma::write_file(out, rep.draws);
        fdnoma::write_file(fdnoma::sibling_path(out, "summary"), rep.summary);
        fdnoma::write_file(fdnoma::sibling_path(out, "trace"), rep.trace);
      }
      if (rep.solver_failures > 0) {
        std::cerr << "sumrate: " << rep.solver_failures << " draw(s) hit a solver failure\n";
        return kSolverFailure;
      }
    } else if (validate->parsed()) {
      const fdnoma::ValidationReport rep = fdnoma::validate_sweep_run(cfg, run);
      emit(out, rep.table);
      std::cerr << "validate: " << rep.checked << " checked, " << rep.failures << " outside tolerance, "
                << rep.unsupported << " unsupported\n";
      return rep.ok() ? kOk : kValidationFailed;
    }
  } catch (const fdnoma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fdnoma::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
