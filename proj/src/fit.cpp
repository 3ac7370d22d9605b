#include "gevfit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gevfit/roots.hpp"

namespace gevfit {
namespace {

constexpr double kTieTolerance = 1e-9;

struct SearchState {
  SearchConfig config;
  ProfileCurve coarse;
  std::vector<Candidate> stationary;
};

std::optional<double> warm_for(double xi, const ProfilePoint& near) {
  if (near.gumbel() || (near.xi > 0) != (xi > 0)) return std::nullopt;
  return near.boundary_gap;
}

Candidate refine(const DataSample& data, const SearchConfig& cfg, const ProfilePoint& left,
                 const ProfilePoint& right) {
  const auto eval = [&](double xi) {
    const ProfilePoint& near = std::abs(xi - left.xi) < std::abs(xi - right.xi) ? left : right;
    return profile_loglik(xi, data, cfg.beta_tol, warm_for(xi, near));
  };
  const auto deriv = [&](double xi) { return eval(xi).pl_deriv; };
  const RootResult root = brent(deriv, left.xi, right.xi, left.pl_deriv, right.pl_deriv, cfg.refine_tol);
  const CandidateKind kind = left.pl_deriv > 0 ? CandidateKind::kMaximum : CandidateKind::kMinimum;
  return {eval(root.x), kind};
}

SearchState search(const DataSample& data, const SearchConfig& config) {
  SearchState st;
  st.config = config;
  st.config.xi_upper = config.resolved_upper(data.size());
  st.config.validate(data.size());
  const std::vector<double> grid = coarse_grid(st.config, data.size());
  st.coarse = curve(data, grid, st.config.beta_tol);
  const auto& pts = st.coarse.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].pl_deriv;
    const double b = pts[i + 1].pl_deriv;
    if (a == 0.0) {
      const bool max = (i == 0 || pts[i - 1].pl_deriv > 0) && b < 0;
      st.stationary.push_back({pts[i], max ? CandidateKind::kMaximum : CandidateKind::kMinimum});
      continue;
    }
    if ((a > 0) == (b > 0) || b == 0.0) continue;
    try {
      st.stationary.push_back(refine(data, st.config, pts[i], pts[i + 1]));
    } catch (const Error& e) {
      st.coarse.failures.push_back({0.5 * (pts[i].xi + pts[i + 1].xi), e.what()});
    }
  }
  if (!pts.empty() && pts.back().pl_deriv == 0.0) st.stationary.push_back({pts.back(), CandidateKind::kMaximum});
  return st;
}

bool better(const ProfilePoint& a, const ProfilePoint& b, double tie) {
  if (std::abs(a.pl - b.pl) <= tie) return std::abs(a.xi) < std::abs(b.xi);
  return a.pl > b.pl;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double SearchConfig::resolved_upper(Eigen::Index n) const {
  if (xi_upper) return *xi_upper;
  return std::min(static_cast<double>(n) - 1.0 - 1e-6, 5.0);
}

void SearchConfig::validate(Eigen::Index n) const {
  const double hi = resolved_upper(n);
  if (!(xi_lower > -1.0)) throw PreconditionViolated("xi_lower must exceed -1");
  if (!(hi < static_cast<double>(n) - 1.0)) throw PreconditionViolated("xi_upper must be below n - 1");
  if (!(xi_lower < hi)) throw PreconditionViolated("xi_lower must be below xi_upper");
  if (coarse_grid_size < 2) throw PreconditionViolated("coarse grid needs at least 2 points");
  if (!(refine_tol > 0.0) || !(beta_tol > 0.0)) throw PreconditionViolated("tolerances must be positive");
}

std::string to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::kMaximum:
      return "maximum";
    case CandidateKind::kMinimum:
      return "minimum";
    case CandidateKind::kGumbel:
      return "gumbel";
    case CandidateKind::kSearchBound:
      return "search_bound";
  }
  return "unknown";
}

std::vector<double> coarse_grid(const SearchConfig& config, Eigen::Index n) {
  const double lo = std::log1p(config.xi_lower);
  const double hi = std::log1p(config.resolved_upper(n));
  const int m = config.coarse_grid_size;
  std::vector<double> grid(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) grid[static_cast<std::size_t>(i)] = std::expm1(lo + (hi - lo) * i / (m - 1));
  grid.front() = config.xi_lower;
  grid.back() = config.resolved_upper(n);
  return grid;
}

FitResult fit(const DataSample& data, const SearchConfig& config) {
  SearchState st = search(data, config);
  const auto& pts = st.coarse.points;
  if (pts.empty()) throw NoCandidate("profile likelihood could not be evaluated anywhere on the search interval");
  const double tie = kTieTolerance * static_cast<double>(data.size());

  FitResult r;
  r.config = st.config;
  r.stationary_points = st.stationary;

  std::vector<Candidate> candidates = st.stationary;
  if (st.config.xi_lower < 0.0 && *st.config.xi_upper > 0.0) {
    try {
      candidates.push_back({gumbel_cross_section(data, st.config.beta_tol), CandidateKind::kGumbel});
    } catch (const Error& e) {
      r.warnings.push_back(std::string("gumbel candidate unavailable: ") + e.what());
    }
  }

  const ProfilePoint& end_best = better(pts.front(), pts.back(), tie) ? pts.front() : pts.back();
  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!best || better(c.point, best->point, tie)) best = &c;
  }
  Candidate chosen;
  if (best) {
    chosen = *best;
    for (const auto& c : candidates) {
      if (&c != best && std::abs(c.point.pl - best->point.pl) <= tie)
        r.warnings.push_back("near-tie with candidate at xi = " + fmt(c.point.xi) + "; smaller |xi| kept");
    }
    if (end_best.pl > chosen.point.pl + tie) {
      r.at_search_bound = true;
      r.warnings.push_back("profile likelihood at search bound xi = " + fmt(end_best.xi) +
                           " exceeds the best interior candidate");
    }
  } else {
    chosen = {end_best, CandidateKind::kSearchBound};
    r.at_search_bound = true;
    r.warnings.push_back("no interior stationary point; maximum taken at search bound xi = " + fmt(end_best.xi));
  }

  r.point = chosen.point;
  r.theta_hat = chosen.point.theta();
  r.beta_hat = chosen.point.beta_n;
  r.loglik = log_likelihood(r.theta_hat, data);
  r.coarse = std::move(st.coarse);
  for (const auto& f : r.coarse.failures)
    r.warnings.push_back("profile evaluation failed at xi = " + fmt(f.xi) + ": " + f.what);
  if (r.theta_hat.xi <= st.config.warn_below)
    r.warnings.push_back("xi_hat = " + fmt(r.theta_hat.xi) +
                         " is at or below -0.5: the estimator is not asymptotically normal");
  try {
    r.inference = infer(r.theta_hat, data);
    if (!r.inference->neg_definite) r.warnings.push_back("observed information is not positive definite");
    if (r.inference->condition_number > 1e12) r.warnings.push_back("observed information is numerically singular");
  } catch (const Error& e) {
    r.warnings.push_back(std::string("inference unavailable: ") + e.what());
  }
  return r;
}

std::vector<Candidate> candidate_report(const DataSample& data, const SearchConfig& config) {
  std::vector<Candidate> out = search(data, config).stationary;
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.point.pl > b.point.pl; });
  return out;
}

}  // namespace gevfit
