#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gevfit/fit.hpp"
#include "gevfit/rng.hpp"
#include "support/nelder_mead.hpp"

using namespace gevfit;

namespace {

const DataSample& figure2_data() {
  static const DataSample d = sample(Params(0.5, 20, 0.2), 1000, 7);
  return d;
}

bool has_warning(const FitResult& r, const std::string& needle) {
  return std::any_of(r.warnings.begin(), r.warnings.end(),
                     [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("search config") {
  SearchConfig c;
  CHECK(c.resolved_upper(1000) == 5.0);
  CHECK(c.resolved_upper(3) == doctest::Approx(2 - 1e-6));
  c.xi_lower = -1.0;
  CHECK_THROWS_AS(c.validate(100), PreconditionViolated);
  c.xi_lower = 0.5;
  c.xi_upper = 0.4;
  CHECK_THROWS_AS(c.validate(100), PreconditionViolated);
  c.xi_upper = 99.0;
  CHECK_THROWS_AS(c.validate(100), PreconditionViolated);
}

TEST_CASE("coarse grid spans the interval and concentrates near -1") {
  const SearchConfig c;
  const auto g = coarse_grid(c, 1000);
  REQUIRE(g.size() == 256);
  CHECK(g.front() == c.xi_lower);
  CHECK(g.back() == 5.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g[1] - g[0] < g[g.size() - 1] - g[g.size() - 2]);
}

TEST_CASE("fit recovers the shape of figure-2 data") {
  const DataSample& d = figure2_data();
  const FitResult r = fit(d);
  REQUIRE(r.inference);
  REQUIRE(r.inference->se);
  CHECK(std::abs(r.theta_hat.xi - 0.2) < 3 * (*r.inference->se)(kXi));
  CHECK(r.inference->neg_definite);
  CHECK(support_contains(r.theta_hat, d));
  CHECK(r.loglik == doctest::Approx(log_likelihood(r.theta_hat, d)).epsilon(1e-12));
  CHECK(r.beta_hat == doctest::Approx(r.theta_hat.beta()).epsilon(1e-12));
  CHECK_FALSE(r.at_search_bound);
  const double n = static_cast<double>(d.size());
  for (const auto& c : r.stationary_points) {
    if (c.kind == CandidateKind::kMaximum || c.kind == CandidateKind::kMinimum)
      CHECK(std::abs(c.point.pl_deriv) < 1e-6 * n);
  }
}

TEST_CASE("fit is location-scale equivariant") {
  const DataSample& d = figure2_data();
  const FitResult r = fit(d);
  for (const auto& [a, c] : std::vector<std::pair<double, double>>{{2.0, -5.0}, {0.01, 100.0}}) {
    const FitResult m = fit(d.affine(a, c));
    CHECK(std::abs(m.theta_hat.xi - r.theta_hat.xi) < 1e-8);
    CHECK(std::abs(m.theta_hat.tau - a * r.theta_hat.tau) < 1e-8 * a * r.theta_hat.tau);
    CHECK(std::abs(m.theta_hat.mu - (a * r.theta_hat.mu + c)) < 1e-8 * std::abs(a * r.theta_hat.mu + c));
  }
}

TEST_CASE("candidate report") {
  const DataSample& d = figure2_data();
  const auto report = candidate_report(d);
  REQUIRE_FALSE(report.empty());
  for (std::size_t i = 1; i < report.size(); ++i) CHECK(report[i - 1].point.pl >= report[i].point.pl);
  CHECK(report[0].kind == CandidateKind::kMaximum);
  const auto maxima = std::count_if(report.begin(), report.end(),
                                    [](const Candidate& c) { return c.kind == CandidateKind::kMaximum; });
  CHECK(maxima == 1);
  const double n = static_cast<double>(d.size());
  for (const auto& c : report)
    if (c.kind != CandidateKind::kGumbel) CHECK(std::abs(c.point.pl_deriv) < 1e-6 * n);

  SearchConfig fine;
  fine.coarse_grid_size = 1024;
  const auto refined = candidate_report(d, fine);
  REQUIRE_FALSE(refined.empty());
  CHECK(std::abs(refined[0].point.xi - report[0].point.xi) < 1e-6);
}

TEST_CASE("fit on the five-point fixture stays inside the search interval") {
  const DataSample d(std::vector<double>{0, 1, 2, 3, 10});
  const FitResult r = fit(d);
  CHECK(r.theta_hat.xi < 4.0);
  CHECK(support_contains(r.theta_hat, d));
  CHECK(r.at_search_bound);
  CHECK(has_warning(r, "search bound"));
}

TEST_CASE("strongly negative shape triggers the normality warning") {
  const DataSample d = sample(Params(1, 0, -0.8), 400, 3);
  const FitResult r = fit(d);
  REQUIRE(r.theta_hat.xi <= -0.5);
  CHECK(has_warning(r, "xi_hat"));
  CHECK((!r.inference || !r.inference->se));
}

TEST_CASE("the Gumbel slice competes with the stationary points") {
  const DataSample d = sample(Params(1, 0, 0), 500, 8);
  const FitResult r = fit(d);
  CHECK(std::abs(r.theta_hat.xi) < 0.2);
  CHECK(r.loglik >= gumbel_cross_section(d).pl - 1e-9 * static_cast<double>(d.size()));
  SearchConfig positive;
  positive.xi_lower = 0.5;
  const FitResult p = fit(d, positive);
  CHECK(p.theta_hat.xi >= 0.5);
  CHECK(p.loglik <= r.loglik);
}

TEST_CASE("fit beats a multi-start simplex search") {
  for (const double xi0 : {-0.2, 0.2}) {
    const DataSample d = sample(Params(0.5, 20, xi0), 50, 31);
    const FitResult r = fit(d);
    UniformStream u(9);
    double best = -1e300;
    for (int s = 0; s < 20; ++s) {
      const Eigen::Vector3d start(std::log(0.2 + u()), d.y_min() + u() * d.range(), 0.8 * u() - 0.3);
      const auto f = [&](const Eigen::Vector3d& x) {
        const double l = log_likelihood(Params(std::exp(x(0)), x(1), x(2)), d);
        return std::isfinite(l) ? -l : 1e300;
      };
      best = std::max(best, -oracle::nelder_mead(f, start, Eigen::Vector3d(0.3, 0.3, 0.1)).value);
    }
    CHECK(r.loglik >= best - 1e-6 * static_cast<double>(d.size()));
  }
}
