#include "argmin/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "argmin/errors.hpp"

namespace argmin {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, long row, const std::string& col) {
  if (cell.empty())
    throw DataError("empty cell in column '" + col + "' at data row " +
                    std::to_string(row));
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size())
    throw DataError("cannot parse '" + cell + "' in column '" + col +
                    "' at data row " + std::to_string(row));
  return v;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input file: " + path);
  CsvTable table;
  table.columns = split_line(line);
  if (table.columns.empty()) throw DataError("header row has no columns");
  for (const std::string& name : table.columns) {
    if (name.empty()) throw DataError("header row has an unnamed column");
    if (std::count(table.columns.begin(), table.columns.end(), name) > 1)
      throw DataError("duplicate column name: " + name);
  }
  const std::size_t p = table.columns.size();
  table.data.assign(p, {});
  long row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != p)
      throw DataError("data row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(p));
    for (std::size_t j = 0; j < p; ++j)
      table.data[j].push_back(parse_number(cells[j], row, table.columns[j]));
    ++row;
  }
  if (row == 0) throw DataError("no data rows in " + path);
  return table;
}

Dataset dataset_from_csv(const CsvTable& table, ModelTag tag, int markov_k) {
  const long n = table.rows();
  auto find = [&](const std::string& name) {
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      if (table.columns[j] == name) return static_cast<int>(j);
    return -1;
  };

  if (tag == ModelTag::Cox || tag == ModelTag::ExpHazard) {
    const int jt = find("time"), je = find("event");
    if (jt < 0) throw DataError("survival data needs a 'time' column");
    if (je < 0) throw DataError("survival data needs an 'event' column");
    VectorXd time(n);
    VectorXi event(n);
    for (long i = 0; i < n; ++i) {
      time(i) = table.data[jt][i];
      const double e = table.data[je][i];
      if (e != 0.0 && e != 1.0)
        throw DataError("event flags must be 0 or 1");
      event(i) = static_cast<int>(e);
    }
    std::vector<int> cov;
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      if (static_cast<int>(j) != jt && static_cast<int>(j) != je)
        cov.push_back(static_cast<int>(j));
    MatrixXd X(n, static_cast<long>(cov.size()));
    for (std::size_t j = 0; j < cov.size(); ++j)
      for (long i = 0; i < n; ++i) X(i, j) = table.data[cov[j]][i];
    return Dataset::survival(std::move(X), std::move(time), std::move(event));
  }

  const int jy = find("y");
  if (jy < 0) throw DataError("expected a response column named 'y'");

  if (tag == ModelTag::MarkovPl) {
    std::vector<int> path(n);
    int seen_max = 0;
    for (long i = 0; i < n; ++i) {
      const double v = table.data[jy][i];
      if (v != std::floor(v)) throw DataError("states must be integers");
      path[i] = static_cast<int>(v);
      seen_max = std::max(seen_max, path[i]);
    }
    return Dataset::markov(std::move(path),
                           markov_k > 0 ? markov_k : seen_max);
  }

  VectorXd y(n);
  for (long i = 0; i < n; ++i) y(i) = table.data[jy][i];
  std::vector<int> cov;
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    if (static_cast<int>(j) != jy) cov.push_back(static_cast<int>(j));
  MatrixXd X(n, static_cast<long>(cov.size()));
  for (std::size_t j = 0; j < cov.size(); ++j)
    for (long i = 0; i < n; ++i) X(i, j) = table.data[cov[j]][i];

  switch (tag) {
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic:
      return Dataset::binary(std::move(X), std::move(y));
    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic:
      return Dataset::count(std::move(X), std::move(y));
    default:
      return Dataset::continuous(std::move(X), std::move(y));
  }
}

}  // namespace argmin
