#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gevfit/fit.hpp"
#include "gevfit/format.hpp"
#include "gevfit/io.hpp"
#include "gevfit/lab.hpp"
#include "gevfit/profile.hpp"

namespace {

using namespace gevfit;

constexpr int kUsageError = 1;
constexpr int kNumericalError = 2;

struct InputOptions {
  std::string input;
  std::string column{"0"};
  std::size_t block_size{0};
};

struct OutputOptions {
  std::string output;
  std::string format{"json"};
};

void add_input(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("--input", o.input, "CSV file (standard input when absent)");
  cmd->add_option("--column", o.column, "Column name or zero-based index");
  cmd->add_option("--block-size", o.block_size, "Fit block maxima of this many consecutive values");
}

void add_output(CLI::App* cmd, OutputOptions& o, const std::string& default_format) {
  o.format = default_format;
  cmd->add_option("--output", o.output, "Output path (standard output when absent)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

DataSample load(const InputOptions& o) {
  DataSample raw = o.input.empty() ? ingest_csv(std::cin, o.column) : ingest_csv(std::filesystem::path(o.input), o.column);
  if (o.block_size > 1) return block_maxima(raw, BlockSpec{o.block_size, true});
  return raw;
}

void emit(const OutputOptions& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + o.output);
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 2) throw PreconditionViolated("--grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

const std::vector<std::string> kExperiments = {"rate",           "pseudo-lln",      "uniform-consistency",
                                               "seitz",          "boundary-divergence", "figure2",
                                               "local-concavity", "wald-coverage"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global maximum likelihood fitting of the generalized extreme value distribution"};
  app.require_subcommand(1);

  InputOptions in;
  OutputOptions fit_out;
  OutputOptions profile_out;
  OutputOptions sim_out;
  std::optional<double> xi_min;
  std::optional<double> xi_max;
  std::optional<int> grid;
  double tol = kDefaultBetaTol;

  auto* fit_cmd = app.add_subcommand("fit", "Fit the GEV distribution by global profile likelihood");
  add_input(fit_cmd, in);
  add_output(fit_cmd, fit_out, "json");
  fit_cmd->add_option("--xi-min", xi_min, "Lower end of the shape search interval");
  fit_cmd->add_option("--xi-max", xi_max, "Upper end of the shape search interval");
  fit_cmd->add_option("--grid", grid, "Coarse search grid size");
  fit_cmd->add_option("--tol", tol, "Relative tolerance of the slice root");

  auto* profile_cmd = app.add_subcommand("profile", "Profile log-likelihood on a linear shape grid");
  add_input(profile_cmd, in);
  add_output(profile_cmd, profile_out, "csv");
  profile_cmd->add_option("--xi-min", xi_min, "First grid point");
  profile_cmd->add_option("--xi-max", xi_max, "Last grid point");
  profile_cmd->add_option("--grid", grid, "Number of grid points");
  profile_cmd->add_option("--tol", tol, "Relative tolerance of the slice root");

  double tau = 1.0;
  double mu = 0.0;
  double xi = 0.0;
  std::vector<Eigen::Index> n_values;
  std::uint64_t seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a seeded GEV sample");
  add_output(sim_cmd, sim_out, "csv");
  sim_cmd->add_option("--tau", tau, "Scale")->required();
  sim_cmd->add_option("--mu", mu, "Location")->required();
  sim_cmd->add_option("--xi", xi, "Shape")->required();
  sim_cmd->add_option("--n", n_values, "Sample size")->required()->expected(1);
  sim_cmd->add_option("--seed", seed, "Random seed");

  std::string experiment;
  std::string out_dir = ".";
  ExperimentConfig cfg;
  std::optional<int> replicates;
  std::optional<double> v_tau;
  std::optional<double> v_mu;
  std::optional<double> v_xi;
  int k_term = 1;
  int a_term = 0;
  int b_term = 0;
  double alpha_min = -1.0;
  double alpha_max = 3.0;
  double radius = 0.02;
  int probes = 64;
  int instances = 1000;
  auto* verify_cmd = app.add_subcommand("verify", "Run a seeded verification experiment");
  verify_cmd->add_option("experiment", experiment, "Experiment name")->required()->check(CLI::IsMember(kExperiments));
  verify_cmd->add_option("--input", in.input, "CSV data for boundary-divergence (default: 0,1,2,3,10)");
  verify_cmd->add_option("--column", in.column, "Column name or zero-based index");
  verify_cmd->add_option("--output", out_dir, "Directory for <name>_report.json and <name>_raw.csv");
  verify_cmd->add_option("--seed", cfg.seed, "Master seed");
  verify_cmd->add_option("--tau", v_tau, "True scale");
  verify_cmd->add_option("--mu", v_mu, "True location");
  verify_cmd->add_option("--xi", v_xi, "True shape");
  verify_cmd->add_option("--n", n_values, "Sample sizes (repeat or comma-separate)")->delimiter(',');
  verify_cmd->add_option("--replicates", replicates, "Replicates per sample size");
  verify_cmd->add_option("--gamma", cfg.gamma, "Rate exponent gamma");
  verify_cmd->add_option("--k", k_term, "Pseudo-LLN power k");
  verify_cmd->add_option("--a", a_term, "Pseudo-LLN term a (0 or 1)");
  verify_cmd->add_option("--b", b_term, "Gamma derivative order b (0, 1 or 2)");
  verify_cmd->add_option("--alpha-min", alpha_min, "m of the alpha interval");
  verify_cmd->add_option("--alpha-max", alpha_max, "M of the alpha interval");
  verify_cmd->add_option("--radius", radius, "Concavity box radius");
  verify_cmd->add_option("--probes", probes, "Concavity probes per replicate");
  verify_cmd->add_option("--instances", instances, "Seitz instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (fit_cmd->parsed()) {
      const DataSample data = load(in);
      SearchConfig sc;
      if (xi_min) sc.xi_lower = *xi_min;
      if (xi_max) sc.xi_upper = *xi_max;
      if (grid) sc.coarse_grid_size = *grid;
      sc.beta_tol = tol;
      const FitResult r = fit(data, sc);
      std::ostringstream os;
      if (fit_out.format == "json") {
        os << to_json(r, data).dump(2) << '\n';
      } else {
        write_fit_csv(os, r);
      }
      emit(fit_out, os.str());
    } else if (profile_cmd->parsed()) {
      const DataSample data = load(in);
      SearchConfig sc;
      const double lo = xi_min.value_or(sc.xi_lower);
      const double hi = xi_max.value_or(sc.resolved_upper(data.size()));
      const ProfileCurve c = curve(data, linear_grid(lo, hi, grid.value_or(101)), tol);
      for (const auto& f : c.failures) std::cerr << "warning: xi = " << format_double(f.xi) << ": " << f.what << '\n';
      std::ostringstream os;
      if (profile_out.format == "csv") {
        write_csv(os, c);
      } else {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& p : c.points)
          j.push_back({{"xi", p.xi},
                       {"beta_n", std::isnan(p.beta_n) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(p.beta_n)},
                       {"tau_n", p.tau_n},
                       {"mu_n", p.mu_n},
                       {"pl", p.pl},
                       {"pl_deriv", p.pl_deriv},
                       {"iters", p.solver_iterations}});
        os << j.dump(2) << '\n';
      }
      emit(profile_out, os.str());
    } else if (sim_cmd->parsed()) {
      const DataSample data = sample(Params(tau, mu, xi), n_values.at(0), seed);
      std::ostringstream os;
      if (sim_out.format == "csv") {
        write_sample_csv(os, data);
      } else {
        std::vector<double> v(data.original().begin(), data.original().end());
        os << nlohmann::ordered_json(v).dump() << '\n';
      }
      emit(sim_out, os.str());
    } else if (verify_cmd->parsed()) {
      cfg.theta0 = Params(v_tau.value_or(cfg.theta0.tau), v_mu.value_or(cfg.theta0.mu), v_xi.value_or(cfg.theta0.xi));
      if (!n_values.empty()) cfg.n_grid = n_values;
      cfg.b = GammaDerivOrder(b_term);
      cfg.alpha_interval = {alpha_min, alpha_max};
      ExperimentReport rep;
      if (experiment == "rate") {
        if (n_values.empty()) cfg.n_grid = {1000, 10000, 100000, 1000000};
        cfg.replicates = replicates.value_or(200);
        rep = rate_experiment(cfg);
      } else if (experiment == "pseudo-lln") {
        if (n_values.empty()) cfg.n_grid = {1000, 10000, 40000};
        cfg.replicates = replicates.value_or(100);
        rep = pseudo_lln_experiment(cfg, k_term, a_term);
      } else if (experiment == "uniform-consistency") {
        cfg.replicates = replicates.value_or(100);
        rep = uniform_consistency_experiment(cfg);
      } else if (experiment == "seitz") {
        rep = seitz_experiment(instances, cfg.seed);
      } else if (experiment == "boundary-divergence") {
        const DataSample data = in.input.empty() ? DataSample(std::vector<double>{0, 1, 2, 3, 10})
                                                 : ingest_csv(std::filesystem::path(in.input), in.column);
        rep = boundary_divergence_check(data);
      } else {
        if (n_values.empty()) cfg.n_grid = {1000};
        if (experiment == "figure2") {
          cfg.replicates = replicates.value_or(50);
          rep = figure2_experiment(cfg);
        } else if (experiment == "local-concavity") {
          cfg.replicates = replicates.value_or(50);
          rep = local_concavity_experiment(cfg, radius, probes);
        } else {
          cfg.replicates = replicates.value_or(500);
          rep = wald_coverage_experiment(cfg);
        }
      }
      const auto path = write_report(rep, out_dir);
      std::cout << (rep.passed() ? "PASS " : "FAIL ") << rep.name << ' ' << path.string() << '\n';
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return 0;
}
