#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gevfit/gev.hpp"
#include "gevfit/inference.hpp"
#include "gevfit/profile.hpp"

namespace gevfit {

/// Search interval and tolerances of the global profile search.
struct SearchConfig {
  double xi_lower{-0.99};
  /// Defaults to min(n - 1 - 1e-6, 5).
  std::optional<double> xi_upper;
  int coarse_grid_size{256};
  double refine_tol{1e-10};
  double beta_tol{kDefaultBetaTol};
  /// A fitted xi at or below this value triggers a warning: the estimator is
  /// not asymptotically normal there.
  double warn_below{-0.5};

  /// Upper search bound for a sample of size n.
  [[nodiscard]] double resolved_upper(Eigen::Index n) const;
  /// Throws PreconditionViolated on an empty or out-of-range interval.
  void validate(Eigen::Index n) const;
};

enum class CandidateKind { kMaximum, kMinimum, kGumbel, kSearchBound };

[[nodiscard]] std::string to_string(CandidateKind k);

struct Candidate {
  ProfilePoint point;
  CandidateKind kind{CandidateKind::kMaximum};
};

struct FitResult {
  Params theta_hat;
  double beta_hat{};  ///< NaN when the fit is on the Gumbel slice
  double loglik{};
  ProfilePoint point;
  /// Stationary points of PL_n found inside the search interval.
  std::vector<Candidate> stationary_points;
  std::vector<std::string> warnings;
  std::optional<InferenceResult> inference;
  ProfileCurve coarse;
  SearchConfig config;  ///< with xi_upper resolved
  bool at_search_bound{false};
};

/// Coarse xi grid, uniform in log(1 + xi), endpoints included.
std::vector<double> coarse_grid(const SearchConfig& config, Eigen::Index n);

/// Global maximizer of PL_n over the search interval. The coarse grid brackets
/// every sign change of PL'_n; each bracket is refined with Brent's method.
/// The Gumbel slice competes as an extra candidate when 0 lies in the
/// interval. PL_n values within 1e-9 n count as tied and the smaller |xi|
/// wins. Throws NoCandidate when no profile point could be evaluated.
FitResult fit(const DataSample& data, const SearchConfig& config = {});

/// All stationary points of PL_n on the search interval, best first.
std::vector<Candidate> candidate_report(const DataSample& data, const SearchConfig& config = {});

}  // namespace gevfit
