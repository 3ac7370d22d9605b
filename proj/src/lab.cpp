#include "gevfit/lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "gevfit/format.hpp"
#include "gevfit/inference.hpp"
#include "gevfit/io.hpp"
#include "gevfit/parallel.hpp"
#include "gevfit/rng.hpp"

namespace gevfit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMinReplicates = 50;
constexpr double kFigure2Bound = 0.03;
constexpr double kWaldZ = 1.959963984540054;
constexpr double kSeitzSlack = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionViolated(what);
}

void validate_common(const ExperimentConfig& c, bool needs_grid) {
  require(c.theta0.xi != 0.0, "experiment requires xi0 != 0");
  require(c.replicates >= kMinReplicates, "experiment requires at least 50 replicates");
  require(!c.n_grid.empty(), "experiment requires a non-empty n grid");
  for (const auto n : c.n_grid) require(n >= 2, "sample sizes must be at least 2");
  if (needs_grid) require(c.n_grid.size() >= 2, "trend verdicts need at least two sample sizes");
}

// Runs fn(n_index, rep) over the full (n, replicate) table in parallel.
template <typename Fn>
void for_each_replicate(const ExperimentConfig& c, Fn&& fn) {
  const auto reps = static_cast<std::size_t>(c.replicates);
  parallel_for(c.n_grid.size() * reps, [&](std::size_t i) { fn(i / reps, i % reps); });
}

double mean_pow_log(const Eigen::ArrayXd& lw, double exponent, int b) {
  const Eigen::ArrayXd e = (exponent * lw).exp();
  switch (b) {
    case 0:
      return e.mean();
    case 1:
      return (e * lw).mean();
    default:
      return (e * lw.square()).mean();
  }
}

double gamma_target(double xi0, GammaDerivOrder b, double x) {
  return std::pow(-xi0, b.value()) * gamma_deriv(b, x);
}

std::string term_label(const LlnTerm& t) {
  return "k" + std::to_string(t.k) + "_a" + std::to_string(t.a) + "_b" + std::to_string(t.b.value());
}

}  // namespace

SearchConfig lab_search_config() {
  SearchConfig c;
  c.coarse_grid_size = 48;
  return c;
}

std::string to_string(Trend t) { return t == Trend::kIncreasing ? "increasing" : "decreasing"; }

bool strictly_monotone(std::span<const double> values, Trend expected) {
  if (values.empty()) return false;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const bool ok = expected == Trend::kIncreasing ? values[i + 1] > values[i] : values[i + 1] < values[i];
    if (!ok) return false;
  }
  return true;
}

bool ExperimentReport::passed() const {
  const bool trends = std::all_of(series.begin(), series.end(), [](const SeriesStats& s) {
    return s.informational || s.verdict;
  });
  const bool rest = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  return trends && rest;
}

double sample_quantile(std::vector<double> values, double p) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SeriesStats summarize(std::string statistic, Trend expected, const std::vector<std::vector<double>>& per_n,
                      bool informational) {
  SeriesStats s;
  s.statistic = std::move(statistic);
  s.expected = expected;
  s.informational = informational;
  for (const auto& v : per_n) {
    s.median.push_back(sample_quantile(v, 0.5));
    s.lower_quartile.push_back(sample_quantile(v, 0.25));
    s.upper_quartile.push_back(sample_quantile(v, 0.75));
  }
  s.verdict = strictly_monotone(s.median, expected);
  return s;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n_index, std::size_t rep) {
  return stream_seed(stream_seed(seed, n_index), rep);
}

ExperimentReport rate_experiment(const ExperimentConfig& c) {
  validate_common(c, true);
  require(c.gamma > 0.0, "rate experiment requires gamma > 0");
  const double xi0 = c.theta0.xi;
  const double beta0 = c.theta0.beta();
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  const std::size_t grid = c.n_grid.size();
  // Columns: y_min, y_max, bound_plus, bound_minus, far_plus, far_minus. The
  // far statistics track the unbounded extreme in absolute value.
  std::vector<std::array<double, 6>> rows(grid * reps);
  for_each_replicate(c, [&](std::size_t ni, std::size_t r) {
    const Eigen::Index n = c.n_grid[ni];
    const auto [y1, yn] = sample_extremes(c.theta0, n, replicate_seed(c.seed, ni, r));
    const double nn = static_cast<double>(n);
    const double ln = std::log(nn);
    const double up = (1.0 + c.gamma) * xi0;
    const double down = (1.0 - c.gamma) * xi0;
    auto& row = rows[ni * reps + r];
    row[0] = y1;
    row[1] = yn;
    if (xi0 > 0) {
      row[2] = std::pow(ln, up) * (y1 - beta0);
      row[3] = std::pow(ln, down) * (y1 - beta0);
      row[4] = std::abs(std::pow(nn, -up) * yn);
      row[5] = std::abs(std::pow(nn, -down) * yn);
    } else {
      row[2] = std::pow(nn, -up) * (beta0 - yn);
      row[3] = std::pow(nn, -down) * (beta0 - yn);
      row[4] = std::abs(std::pow(ln, up) * y1);
      row[5] = std::abs(std::pow(ln, down) * y1);
    }
  });

  ExperimentReport rep;
  rep.name = "rate";
  rep.config = to_json(c);
  rep.n_grid = c.n_grid;
  rep.raw.columns = {"n", "replicate", "y_min", "y_max", "bound_plus", "bound_minus", "far_plus", "far_minus"};
  std::array<std::vector<std::vector<double>>, 4> per_n;
  for (auto& p : per_n) p.resize(grid);
  for (std::size_t ni = 0; ni < grid; ++ni) {
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& row = rows[ni * reps + r];
      rep.raw.rows.push_back({static_cast<double>(c.n_grid[ni]), static_cast<double>(r), row[0], row[1], row[2],
                              row[3], row[4], row[5]});
      for (int s = 0; s < 4; ++s) per_n[s][ni].push_back(row[2 + s]);
    }
  }
  if (xi0 > 0) {
    rep.series.push_back(summarize("(log n)^((1+gamma) xi0) (Y_(1) - beta0)", Trend::kIncreasing, per_n[0]));
    rep.series.push_back(summarize("(log n)^((1-gamma) xi0) (Y_(1) - beta0)", Trend::kDecreasing, per_n[1]));
    rep.series.push_back(summarize("|n^(-(1+gamma) xi0) Y_(n)|", Trend::kDecreasing, per_n[2], true));
    rep.series.push_back(summarize("|n^(-(1-gamma) xi0) Y_(n)|", Trend::kIncreasing, per_n[3], true));
  } else {
    rep.series.push_back(summarize("n^(-(1+gamma) xi0) (beta0 - Y_(n))", Trend::kIncreasing, per_n[0]));
    rep.series.push_back(summarize("n^(-(1-gamma) xi0) (beta0 - Y_(n))", Trend::kDecreasing, per_n[1]));
    rep.series.push_back(summarize("|(log n)^((1+gamma) xi0) Y_(1)|", Trend::kDecreasing, per_n[2], true));
    rep.series.push_back(summarize("|(log n)^((1-gamma) xi0) Y_(1)|", Trend::kIncreasing, per_n[3], true));
  }
  rep.summary["beta0"] = beta0;
  return rep;
}

double lln_target(const LlnTerm& t, double xi0) {
  const double x = t.k * xi0 + t.a + 1.0;
  require(x > 0.0, "pseudo-LLN term requires k xi0 + a + 1 > 0");
  return gamma_target(xi0, t.b, x);
}

ExperimentReport pseudo_lln_experiment(const ExperimentConfig& c, std::span<const LlnTerm> terms) {
  validate_common(c, true);
  require(!terms.empty(), "pseudo-LLN experiment needs at least one term");
  const double xi0 = c.theta0.xi;
  std::vector<double> targets;
  for (const auto& t : terms) targets.push_back(lln_target(t, xi0));
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  const std::size_t grid = c.n_grid.size();
  const std::size_t m = terms.size();
  std::vector<double> xi_hat(grid * reps, kNaN);
  std::vector<double> phi(grid * reps * m, kNaN);
  for_each_replicate(c, [&](std::size_t ni, std::size_t r) {
    const std::size_t slot = ni * reps + r;
    const DataSample data = sample(c.theta0, c.n_grid[ni], replicate_seed(c.seed, ni, r));
    try {
      const FitResult f = fit(data, c.search);
      if (f.theta_hat.is_gumbel()) return;
      const Eigen::ArrayXd lw = standardize(f.theta_hat, data).w.log();
      xi_hat[slot] = f.theta_hat.xi;
      for (std::size_t j = 0; j < m; ++j) {
        const double e = -terms[j].k - terms[j].a / f.theta_hat.xi;
        phi[slot * m + j] = mean_pow_log(lw, e, terms[j].b.value());
      }
    } catch (const NumericalError&) {
    }
  });

  ExperimentReport rep;
  rep.name = "pseudo_lln";
  rep.config = to_json(c);
  rep.n_grid = c.n_grid;
  rep.raw.columns = {"n", "replicate", "xi_hat"};
  for (const auto& t : terms) {
    rep.raw.columns.push_back("phi_" + term_label(t));
    rep.raw.columns.push_back("gap_" + term_label(t));
  }
  std::vector<std::vector<std::vector<double>>> gaps(m, std::vector<std::vector<double>>(grid));
  int failed = 0;
  for (std::size_t ni = 0; ni < grid; ++ni) {
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t slot = ni * reps + r;
      if (std::isnan(xi_hat[slot])) ++failed;
      std::vector<double> row{static_cast<double>(c.n_grid[ni]), static_cast<double>(r), xi_hat[slot]};
      for (std::size_t j = 0; j < m; ++j) {
        const double g = std::abs(phi[slot * m + j] - targets[j]);
        row.push_back(phi[slot * m + j]);
        row.push_back(g);
        gaps[j][ni].push_back(g);
      }
      rep.raw.rows.push_back(std::move(row));
    }
  }
  nlohmann::ordered_json tj = nlohmann::ordered_json::object();
  for (std::size_t j = 0; j < m; ++j) {
    rep.series.push_back(summarize("|phi_hat - target| " + term_label(terms[j]), Trend::kDecreasing, gaps[j]));
    tj[term_label(terms[j])] = targets[j];
  }
  rep.summary["targets"] = tj;
  rep.summary["failed_replicates"] = failed;
  rep.checks.push_back({"all replicates fitted", failed == 0});
  return rep;
}

ExperimentReport pseudo_lln_experiment(const ExperimentConfig& c, int k, int a) {
  const LlnTerm term{k, a, c.b};
  return pseudo_lln_experiment(c, std::span<const LlnTerm>(&term, 1));
}

std::vector<double> alpha_grid(const ExperimentConfig& c) {
  const auto [m, big_m] = c.alpha_interval;
  const double xi0 = c.theta0.xi;
  require(xi0 != 0.0, "alpha grid requires xi0 != 0");
  require(m < 0.0 && m > -1.0 / std::abs(xi0), "alpha interval requires m in (-1/|xi0|, 0)");
  require(big_m > 0.0, "alpha interval requires M > 0");
  require(c.alpha_grid >= 2, "alpha grid needs at least 2 points");
  const double lo = xi0 > 0 ? m : -big_m;
  const double hi = xi0 > 0 ? big_m : -m;
  std::vector<double> g(static_cast<std::size_t>(c.alpha_grid));
  for (int i = 0; i < c.alpha_grid; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (c.alpha_grid - 1);
  return g;
}

double uniform_gap(const Eigen::ArrayXd& w, double xi0, GammaDerivOrder b, std::span<const double> alphas) {
  const Eigen::ArrayXd lw = w.log();
  double sup = 0.0;
  for (const double alpha : alphas) {
    const double phi_n = mean_pow_log(lw, -alpha, b.value());
    sup = std::max(sup, std::abs(phi_n - gamma_target(xi0, b, alpha * xi0 + 1.0)));
  }
  return sup;
}

ExperimentReport uniform_consistency_experiment(const ExperimentConfig& c) {
  validate_common(c, true);
  const std::vector<double> alphas = alpha_grid(c);
  const double xi0 = c.theta0.xi;
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  const std::size_t grid = c.n_grid.size();
  std::vector<double> xi_hat(grid * reps, kNaN);
  std::vector<double> sup(grid * reps, kNaN);
  for_each_replicate(c, [&](std::size_t ni, std::size_t r) {
    const std::size_t slot = ni * reps + r;
    const DataSample data = sample(c.theta0, c.n_grid[ni], replicate_seed(c.seed, ni, r));
    try {
      const FitResult f = fit(data, c.search);
      if (f.theta_hat.is_gumbel()) return;
      xi_hat[slot] = f.theta_hat.xi;
      sup[slot] = uniform_gap(standardize(f.theta_hat, data).w, xi0, c.b, alphas);
    } catch (const NumericalError&) {
    }
  });

  ExperimentReport rep;
  rep.name = "uniform_consistency";
  rep.config = to_json(c);
  rep.n_grid = c.n_grid;
  rep.raw.columns = {"n", "replicate", "xi_hat", "sup_gap"};
  std::vector<std::vector<double>> per_n(grid);
  int failed = 0;
  for (std::size_t ni = 0; ni < grid; ++ni) {
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t slot = ni * reps + r;
      if (std::isnan(sup[slot])) ++failed;
      rep.raw.rows.push_back({static_cast<double>(c.n_grid[ni]), static_cast<double>(r), xi_hat[slot], sup[slot]});
      per_n[ni].push_back(sup[slot]);
    }
  }
  rep.series.push_back(summarize("sup_alpha |Phi_n(alpha) - Phi(alpha)|", Trend::kDecreasing, per_n));
  rep.summary["alpha_min"] = alphas.front();
  rep.summary["alpha_max"] = alphas.back();
  rep.summary["failed_replicates"] = failed;
  rep.checks.push_back({"all replicates fitted", failed == 0});
  return rep;
}

bool seitz_precondition(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                        std::span<const double> u) {
  const std::size_t n = x.size();
  require(y.size() == n && z.size() == n && u.size() == n, "seitz sequences must have equal length");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dxy = x[i] * y[j] - x[j] * y[i];
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = r + 1; s < n; ++s) {
          if (dxy * (z[r] * u[s] - z[s] * u[r]) < 0.0) return false;
        }
      }
    }
  }
  return true;
}

bool seitz_check(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<const double> u) {
  if (!seitz_precondition(x, y, z, u)) throw PreconditionViolated("seitz determinant condition fails");
  const auto dot = [](std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  };
  const double lhs = dot(x, z) * dot(y, u);
  const double rhs = dot(y, z) * dot(x, u);
  return lhs >= rhs - kSeitzSlack * std::max(std::abs(lhs), std::abs(rhs));
}

ExperimentReport seitz_experiment(int instances, std::uint64_t seed) {
  require(instances >= 1, "seitz experiment needs at least one instance");
  const auto count = static_cast<std::size_t>(instances);
  // Columns: n, xi, gap, precondition, lhs, rhs, holds.
  std::vector<std::array<double, 7>> rows(count);
  parallel_for(count, [&](std::size_t i) {
    UniformStream uni(stream_seed(seed, i));
    const int n = 3 + static_cast<int>(uni() * 28.0);
    std::vector<double> ys(static_cast<std::size_t>(n));
    const double spread = std::exp(-2.0 + 6.0 * uni());
    for (auto& v : ys) {
      const double p = uni();
      v = spread * std::log(p / (1.0 - p));
    }
    std::sort(ys.begin(), ys.end());
    const double xi = 0.02 + 4.0 * uni();
    const double gap = spread * std::exp(-6.0 + 9.0 * uni());
    const double beta = ys.front() - gap;
    std::vector<double> x(ys.size()), y(ys.size(), 1.0), z(ys.size()), u(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double d = ys[k] - beta;
      x[k] = std::pow(d, -1.0 / xi);
      z[k] = 1.0 / (d * d);
      u[k] = 1.0 / d;
    }
    const bool pre = seitz_precondition(x, y, z, u);
    const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
      return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };
    const double lhs = dot(x, z) * dot(y, u);
    const double rhs = dot(y, z) * dot(x, u);
    const bool holds = pre && seitz_check(x, y, z, u);
    rows[i] = {static_cast<double>(n), xi, gap, pre ? 1.0 : 0.0, lhs, rhs, holds ? 1.0 : 0.0};
  });
  ExperimentReport rep;
  rep.name = "seitz";
  rep.config = {{"instances", instances}, {"seed", seed}};
  rep.raw.columns = {"instance", "n", "xi", "gap", "precondition", "lhs", "rhs", "holds"};
  int held = 0;
  int violations = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = rows[i];
    rep.raw.rows.push_back({static_cast<double>(i), r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
    if (r[3] == 1.0) {
      ++held;
      if (r[6] != 1.0) ++violations;
    }
  }
  rep.summary["precondition_held"] = held;
  rep.summary["precondition_failed"] = instances - held;
  rep.summary["violations"] = violations;
  rep.checks.push_back({"no violation when the precondition holds", violations == 0});
  return rep;
}

ExperimentReport boundary_divergence_check(const DataSample& data, std::span<const int> ks) {
  static constexpr int kDefaultKs[] = {2, 3, 4, 5};
  if (ks.empty()) ks = kDefaultKs;
  const double upper = static_cast<double>(data.size()) - 1.0;
  std::vector<double> left;
  std::vector<double> right;
  ExperimentReport rep;
  rep.name = "boundary_divergence";
  rep.raw.columns = {"side", "k", "xi", "pl_deriv"};
  for (const int k : ks) {
    const double eta = std::pow(10.0, -k);
    const double xl = -1.0 + eta;
    const double xr = upper - eta;
    left.push_back(profile_loglik(xl, data).pl_deriv);
    right.push_back(profile_loglik(xr, data).pl_deriv);
    rep.raw.rows.push_back({-1.0, static_cast<double>(k), xl, left.back()});
    rep.raw.rows.push_back({1.0, static_cast<double>(k), xr, right.back()});
  }
  bool tenfold = left.front() < 0.0;
  for (std::size_t i = 0; i + 1 < left.size(); ++i) tenfold = tenfold && left[i + 1] <= 10.0 * left[i];

  // Sign change of PL'_n between the two regimes.
  SearchConfig sc;
  sc.xi_lower = -1.0 + std::pow(10.0, -ks.front());
  sc.xi_upper = upper - std::pow(10.0, -ks.front());
  const ProfileCurve inner = curve(data, coarse_grid(sc, data.size()));
  bool sign_change = false;
  for (std::size_t i = 0; i + 1 < inner.points.size(); ++i)
    sign_change = sign_change || (inner.points[i].pl_deriv < 0) != (inner.points[i + 1].pl_deriv < 0);

  rep.config = {{"n", data.size()}, {"fingerprint", data.fingerprint()}, {"k", std::vector<int>(ks.begin(), ks.end())}};
  rep.summary["left_pl_deriv"] = left;
  rep.summary["right_pl_deriv"] = right;
  rep.checks.push_back({"left strictly decreasing", strictly_monotone(left, Trend::kDecreasing)});
  rep.checks.push_back({"left magnitude grows tenfold per step", tenfold});
  rep.checks.push_back({"right strictly increasing and positive",
                        strictly_monotone(right, Trend::kIncreasing) && right.front() > 0.0});
  rep.checks.push_back({"interior sign change", sign_change});
  return rep;
}

std::vector<double> figure2_grid() {
  std::vector<double> g;
  for (int i = -90; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

Figure2Result figure2_reproduction(const Params& theta0, Eigen::Index n, std::uint64_t seed,
                                   const SearchConfig& search) {
  const DataSample data = sample(theta0, n, seed);
  Figure2Result r;
  r.fit = fit(data, search);
  const std::vector<double> grid = figure2_grid();
  r.curve = curve(data, grid);
  const auto& p = r.curve.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i].pl_deriv > 0 && p[i + 1].pl_deriv <= 0) ++r.interior_maxima;
  }
  if (!p.empty()) {
    const auto top = std::max_element(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.pl < b.pl; });
    r.single_dominant = r.interior_maxima == 1 && top != p.begin() && top != p.end() - 1;
  }
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double d2 = p[i + 1].pl - 2.0 * p[i].pl + p[i - 1].pl;
    pos = pos || d2 > 0;
    neg = neg || d2 < 0;
  }
  r.non_concave = pos && neg;
  return r;
}

ExperimentReport figure2_experiment(const ExperimentConfig& c) {
  require(!c.n_grid.empty() && c.replicates >= 1, "figure 2 experiment needs n and replicates");
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  const double xi0 = c.theta0.xi;
  // Columns: xi_hat, abs_error, interior_maxima, single_dominant, non_concave.
  std::vector<std::array<double, 5>> rows(reps, {kNaN, kNaN, 0, 0, 0});
  parallel_for(reps, [&](std::size_t r) {
    try {
      const Figure2Result f = figure2_reproduction(c.theta0, c.n_grid[0], replicate_seed(c.seed, 0, r), c.search);
      rows[r] = {f.fit.theta_hat.xi, std::abs(f.fit.theta_hat.xi - xi0), static_cast<double>(f.interior_maxima),
                 f.single_dominant ? 1.0 : 0.0, f.non_concave ? 1.0 : 0.0};
    } catch (const NumericalError&) {
    }
  });
  ExperimentReport rep;
  rep.name = "figure2";
  rep.config = to_json(c);
  rep.n_grid = {c.n_grid[0]};
  rep.raw.columns = {"replicate", "xi_hat", "abs_error", "interior_maxima", "single_dominant", "non_concave"};
  std::vector<double> err;
  int dominant = 0;
  int non_concave = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& x = rows[r];
    rep.raw.rows.push_back({static_cast<double>(r), x[0], x[1], x[2], x[3], x[4]});
    err.push_back(x[1]);
    dominant += x[3] == 1.0;
    non_concave += x[4] == 1.0;
  }
  const double med = sample_quantile(err, 0.5);
  rep.summary["median_abs_error"] = med;
  rep.summary["bound"] = kFigure2Bound;
  rep.summary["single_dominant"] = dominant;
  rep.summary["non_concave_curves"] = non_concave;
  rep.checks.push_back({"median |xi_hat - xi0| < 0.03", med < kFigure2Bound});
  rep.checks.push_back({"single dominant interior maximum in every replicate", dominant == c.replicates});
  return rep;
}

ExperimentReport local_concavity_experiment(const ExperimentConfig& c, double radius, int probes) {
  require(!c.n_grid.empty() && c.replicates >= 1, "concavity experiment needs n and replicates");
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  // Columns: evaluated, skipped, worst eigenvalue, negative definite.
  std::vector<std::array<double, 4>> rows(reps, {0, 0, kNaN, 0});
  parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t s = replicate_seed(c.seed, 0, r);
    const DataSample data = sample(c.theta0, c.n_grid[0], s);
    try {
      const FitResult f = fit(data, c.search);
      const ConcavityScan scan = local_concavity_scan(f.theta_hat, data, radius, probes, s);
      rows[r] = {static_cast<double>(scan.evaluated), static_cast<double>(scan.skipped), scan.worst_eigenvalue,
                 scan.all_negative_definite ? 1.0 : 0.0};
    } catch (const Error&) {
    }
  });
  ExperimentReport rep;
  rep.name = "local_concavity";
  rep.config = to_json(c);
  rep.config["radius"] = radius;
  rep.config["probes"] = probes;
  rep.n_grid = {c.n_grid[0]};
  rep.raw.columns = {"replicate", "evaluated", "skipped", "worst_info_eigenvalue", "negative_definite"};
  int ok = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& x = rows[r];
    rep.raw.rows.push_back({static_cast<double>(r), x[0], x[1], x[2], x[3]});
    ok += x[3] == 1.0;
    if (!std::isnan(x[2])) worst = std::min(worst, x[2]);
  }
  rep.summary["negative_definite_replicates"] = ok;
  rep.summary["worst_info_eigenvalue"] = worst;
  rep.checks.push_back({"Hessian negative definite at every probe of every replicate", ok == c.replicates});
  return rep;
}

ExperimentReport wald_coverage_experiment(const ExperimentConfig& c) {
  require(!c.n_grid.empty() && c.replicates >= 1, "coverage experiment needs n and replicates");
  const std::size_t reps = static_cast<std::size_t>(c.replicates);
  const double xi0 = c.theta0.xi;
  // Columns: xi_hat, se_xi, covered.
  std::vector<std::array<double, 3>> rows(reps, {kNaN, kNaN, 0});
  parallel_for(reps, [&](std::size_t r) {
    const DataSample data = sample(c.theta0, c.n_grid[0], replicate_seed(c.seed, 0, r));
    try {
      const FitResult f = fit(data, c.search);
      rows[r][0] = f.theta_hat.xi;
      if (f.inference && f.inference->se) {
        const double se = (*f.inference->se)(kXi);
        rows[r][1] = se;
        rows[r][2] = std::abs(f.theta_hat.xi - xi0) <= kWaldZ * se ? 1.0 : 0.0;
      }
    } catch (const NumericalError&) {
    }
  });
  ExperimentReport rep;
  rep.name = "wald_coverage";
  rep.config = to_json(c);
  rep.n_grid = {c.n_grid[0]};
  rep.raw.columns = {"replicate", "xi_hat", "se_xi", "covered"};
  int covered = 0;
  int missing_se = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& x = rows[r];
    rep.raw.rows.push_back({static_cast<double>(r), x[0], x[1], x[2]});
    covered += x[2] == 1.0;
    missing_se += std::isnan(x[1]);
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(reps);
  rep.summary["coverage"] = rate;
  rep.summary["missing_se"] = missing_se;
  rep.checks.push_back({"coverage in [0.92, 0.98]", rate >= 0.92 && rate <= 0.98});
  return rep;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["theta0"] = {{"tau", c.theta0.tau}, {"mu", c.theta0.mu}, {"xi", c.theta0.xi}};
  j["n_grid"] = c.n_grid;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["gamma"] = c.gamma;
  j["alpha_interval"] = {c.alpha_interval.first, c.alpha_interval.second};
  j["b"] = c.b.value();
  j["alpha_grid"] = c.alpha_grid;
  j["search"] = to_json(c.search);
  return j;
}

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["passed"] = r.passed();
  j["config"] = r.config;
  j["n_grid"] = r.n_grid;
  j["series"] = nlohmann::ordered_json::array();
  for (const auto& s : r.series) {
    j["series"].push_back({{"statistic", s.statistic},
                           {"expected", to_string(s.expected)},
                           {"median", s.median},
                           {"lower_quartile", s.lower_quartile},
                           {"upper_quartile", s.upper_quartile},
                           {"verdict", s.verdict},
                           {"informational", s.informational}});
  }
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}});
  j["summary"] = r.summary;
  return j;
}

void write_csv(std::ostream& out, const RawTable& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

std::filesystem::path write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (r.name + "_raw.csv");
  const auto json_path = dir / (r.name + "_report.json");
  {
    std::ofstream csv(csv_path, std::ios::binary);
    write_csv(csv, r.raw);
    if (!csv) throw Error("cannot write " + csv_path.string());
  }
  nlohmann::ordered_json j = to_json(r);
  j["raw_csv"] = csv_path.filename().string();
  std::ofstream out(json_path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + json_path.string());
  return json_path;
}

}  // namespace gevfit
