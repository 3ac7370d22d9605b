#include "gevfit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "gevfit/format.hpp"

namespace gevfit {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string fmt_line(std::size_t line) { return "line " + std::to_string(line); }

}  // namespace

DataSample ingest_csv(std::istream& in, const std::string& column) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col;
  bool first = true;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (first) {
      first = false;
      const bool numeric_row = std::all_of(cells.begin(), cells.end(), [](const auto& c) {
        return parse_double(c).has_value();
      });
      if (!numeric_row) {
        const auto it = std::find(cells.begin(), cells.end(), column);
        if (it != cells.end()) {
          col = static_cast<std::size_t>(it - cells.begin());
        } else if (const auto idx = parse_index(column); idx && *idx < cells.size()) {
          col = idx;
        } else {
          throw ParseError(fmt_line(line_no) + ": no column '" + column + "' in header");
        }
        continue;
      }
      col = parse_index(column);
      if (!col) throw ParseError(fmt_line(line_no) + ": column '" + column + "' needs a header row");
    }
    if (*col >= cells.size()) throw ParseError(fmt_line(line_no) + ": missing column " + std::to_string(*col));
    const auto v = parse_double(cells[*col]);
    if (!v || !std::isfinite(*v))
      throw ParseError(fmt_line(line_no) + ": cannot parse '" + cells[*col] + "' as a finite number");
    values.push_back(*v);
  }
  if (in.bad()) throw ParseError("read error after " + fmt_line(line_no));
  return DataSample(std::move(values));
}

DataSample ingest_csv(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return ingest_csv(in, column);
}

DataSample block_maxima(const DataSample& raw, const BlockSpec& spec) {
  if (spec.block_size == 0) throw PreconditionViolated("block size must be at least 1");
  const Eigen::ArrayXd& y = raw.original();
  const auto n = static_cast<std::size_t>(y.size());
  const std::size_t m = spec.block_size;
  std::vector<double> maxima;
  for (std::size_t start = 0; start < n; start += m) {
    const std::size_t len = std::min(m, n - start);
    if (len < m && spec.drop_partial) break;
    maxima.push_back(y.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(len)).maxCoeff());
  }
  if (maxima.size() < 2) throw DegenerateData("block maxima need at least 2 blocks");
  return DataSample(std::move(maxima));
}

void write_sample_csv(std::ostream& out, const DataSample& data) {
  out << "value\n";
  for (const double v : data.original()) out << format_double(v) << '\n';
}

nlohmann::ordered_json to_json(const SearchConfig& s) {
  nlohmann::ordered_json j;
  j["xi_lower"] = s.xi_lower;
  j["xi_upper"] = s.xi_upper ? nlohmann::ordered_json(*s.xi_upper) : nlohmann::ordered_json(nullptr);
  j["coarse_grid_size"] = s.coarse_grid_size;
  j["refine_tol"] = s.refine_tol;
  j["beta_tol"] = s.beta_tol;
  return j;
}

nlohmann::ordered_json to_json(const FitResult& r, const DataSample& data) {
  using json = nlohmann::ordered_json;
  json j;
  j["tau"] = r.theta_hat.tau;
  j["mu"] = r.theta_hat.mu;
  j["xi"] = r.theta_hat.xi;
  j["beta"] = std::isnan(r.beta_hat) ? json(nullptr) : json(r.beta_hat);
  j["loglik"] = r.loglik;
  if (r.inference && r.inference->se) {
    const auto& se = *r.inference->se;
    j["se"] = {{"mu", se(kMu)}, {"tau", se(kTau)}, {"xi", se(kXi)}};
  } else {
    j["se"] = nullptr;
  }
  if (r.inference) {
    json h = json::array();
    for (int i = 0; i < 3; ++i) h.push_back({r.inference->hessian.matrix(i, 0), r.inference->hessian.matrix(i, 1),
                                             r.inference->hessian.matrix(i, 2)});
    j["hessian"] = h;
    j["information_condition_number"] = r.inference->condition_number;
  } else {
    j["hessian"] = nullptr;
    j["information_condition_number"] = nullptr;
  }
  j["warnings"] = r.warnings;
  j["stationary_points"] = json::array();
  for (const auto& c : r.stationary_points)
    j["stationary_points"].push_back(
        {{"xi", c.point.xi}, {"pl", c.point.pl}, {"pl_deriv", c.point.pl_deriv}, {"kind", to_string(c.kind)}});
  j["at_search_bound"] = r.at_search_bound;
  j["n"] = data.size();
  j["data_fingerprint"] = data.fingerprint();
  j["config"] = to_json(r.config);
  return j;
}

void write_fit_csv(std::ostream& out, const FitResult& r) {
  out << "tau,mu,xi,beta,loglik,se_mu,se_tau,se_xi\n";
  const bool has_se = r.inference && r.inference->se;
  const auto se = [&](int i) { return has_se ? format_double((*r.inference->se)(i)) : std::string("nan"); };
  out << format_double(r.theta_hat.tau) << ',' << format_double(r.theta_hat.mu) << ','
      << format_double(r.theta_hat.xi) << ',' << format_double(r.beta_hat) << ',' << format_double(r.loglik) << ','
      << se(kMu) << ',' << se(kTau) << ',' << se(kXi) << '\n';
}

}  // namespace gevfit
