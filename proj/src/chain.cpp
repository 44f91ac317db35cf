#include "bmse/chain.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace bmse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kSingular: return "singular";
    case ErrorCode::kNonStationary: return "non_stationary";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNoCutoff: return "no_cutoff";
  }
  return "unknown";
}

ChainMatrix::ChainMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "chain needs at least 2 rows");
  }
  if (data_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "chain needs at least 1 column");
  }
  if (!data_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "chain contains non-finite values");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

ChainMatrix parse_csv(std::istream& in, bool has_header) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  bool header_pending = has_header;

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++rows;
    std::size_t col = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      ++col;
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::kParse, "non-numeric cell '" + std::string(cell) +
                                           "' at " + location(rows, col));
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kParse, "non-finite cell at " + location(rows, col));
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 1) {
      width = col;
    } else if (col != width) {
      throw Error(ErrorCode::kParse, "ragged row " + std::to_string(rows) + ": expected " +
                                         std::to_string(width) + " columns, found " +
                                         std::to_string(col));
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
  if (rows == 0) throw Error(ErrorCode::kParse, "no rows");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * width + c];
    }
  }
  return ChainMatrix(std::move(data));
}

ChainMatrix load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_csv(in, has_header);
}

void write_csv(const ChainMatrix& chain, std::ostream& out) {
  char buf[64];
  std::string line;
  for (Eigen::Index t = 0; t < chain.n(); ++t) {
    line.clear();
    for (Eigen::Index i = 0; i < chain.p(); ++i) {
      if (i > 0) line.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), chain(t, i));
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_csv(const ChainMatrix& chain, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_csv(chain, out);
  if (!out) throw Error(ErrorCode::kIo, "write failure on " + path.string());
}

Eigen::VectorXd mean_vector(const ChainMatrix& chain) {
  return chain.data().colwise().mean().transpose();
}

double centered_autocovariance(const Eigen::Ref<const Eigen::VectorXd>& centered,
                               Eigen::Index lag) {
  const Eigen::Index n = centered.size();
  const Eigen::Index m = n - lag;
  const double s = centered.head(m).dot(centered.segment(lag, m));
  return s / static_cast<double>(n);
}

AcovSeries sample_autocovariance(const ChainMatrix& chain, Eigen::Index component,
                                 Eigen::Index max_lag) {
  if (component < 0 || component >= chain.p()) {
    throw Error(ErrorCode::kInvalidArgument, "component index out of range");
  }
  if (max_lag < 0 || max_lag >= chain.n()) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_lag must satisfy 0 <= max_lag < n (got " + std::to_string(max_lag) + ")");
  }
  const Eigen::VectorXd y = chain.column(component);
  const Eigen::VectorXd centered = y.array() - y.mean();
  AcovSeries out;
  out.component = component;
  out.n = chain.n();
  out.values.resize(static_cast<std::size_t>(max_lag) + 1);
  for (Eigen::Index k = 0; k <= max_lag; ++k) {
    out.values[static_cast<std::size_t>(k)] = centered_autocovariance(centered, k);
  }
  return out;
}

CorrelationScanner::CorrelationScanner(const ChainMatrix& chain)
    : centered_(chain.data().rowwise() - chain.data().colwise().mean()) {
  for (Eigen::Index i = 0; i < centered_.cols(); ++i) {
    const double g0 = centered_autocovariance(centered_.col(i), 0);
    if (g0 > 0.0) {
      live_.push_back(i);
      gamma0_.push_back(g0);
    }
  }
  if (live_.empty()) {
    throw Error(ErrorCode::kDegenerate, "all components are constant; correlation undefined");
  }
}

double CorrelationScanner::max_abs(Eigen::Index lag) const {
  if (lag < 1 || lag >= n()) {
    throw Error(ErrorCode::kInvalidArgument, "lag must satisfy 1 <= lag < n");
  }
  double best = 0.0;
  for (std::size_t j = 0; j < live_.size(); ++j) {
    const double g = centered_autocovariance(centered_.col(live_[j]), lag);
    best = std::max(best, std::abs(g / gamma0_[j]));
  }
  return best;
}

double max_abs_crosscorrelation(const ChainMatrix& chain, Eigen::Index lag) {
  return CorrelationScanner(chain).max_abs(lag);
}

}  // namespace bmse
