#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gevfit/fit.hpp"
#include "gevfit/gev.hpp"
#include "gevfit/profile.hpp"

namespace gevfit {

/// Non-overlapping blocks of `block_size` consecutive observations.
struct BlockSpec {
  std::size_t block_size{1};
  bool drop_partial{true};
};

/// Reads one column of a comma-separated file. `column` is matched against
/// the header first; a non-negative integer that matches no header cell is a
/// zero-based index. A first line whose cells all parse as numbers is data,
/// not a header. Blank lines are skipped. Throws ParseError naming the line.
DataSample ingest_csv(std::istream& in, const std::string& column = "0");
DataSample ingest_csv(const std::filesystem::path& path, const std::string& column = "0");

/// Block maxima in original order. Throws PreconditionViolated for a zero
/// block size and DegenerateData for fewer than 2 blocks.
DataSample block_maxima(const DataSample& raw, const BlockSpec& spec);

/// Header `value`, one observation per line in original order, %.17g.
void write_sample_csv(std::ostream& out, const DataSample& data);

nlohmann::ordered_json to_json(const SearchConfig& config);
nlohmann::ordered_json to_json(const FitResult& result, const DataSample& data);

/// One-row CSV: tau,mu,xi,beta,loglik,se_mu,se_tau,se_xi.
void write_fit_csv(std::ostream& out, const FitResult& result);

}  // namespace gevfit
