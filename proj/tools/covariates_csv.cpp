#include "covariates_csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "peerlab/error.hpp"

namespace peerlab::tools {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

}  // namespace

Matrix read_covariates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("covariate file is empty");
  const auto header = split(line);
  const bool has_node = !header.empty() && header.front() == "node";
  const std::size_t skip = has_node ? 1 : 0;
  if (header.size() <= skip) throw ParseError("covariate file has no value columns");
  const std::size_t cols = header.size() - skip;

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": wrong field count");
    if (has_node && f[0] != std::to_string(rows.size()))
      throw ParseError("line " + std::to_string(line_no) + ": node ids must be 0..n-1 in order");
    std::vector<double> row(cols);
    for (std::size_t k = 0; k < cols; ++k) {
      const std::string& s = f[k + skip];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[k]);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("covariate CSV has no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return m;
}

Matrix read_covariates_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_covariates_csv(in);
}

}  // namespace peerlab::tools
