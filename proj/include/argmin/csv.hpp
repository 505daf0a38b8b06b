#ifndef ARGMIN_CSV_HPP
#define ARGMIN_CSV_HPP

#include <string>
#include <vector>

#include "argmin/dataset.hpp"

namespace argmin {

// Comma-separated numeric table with a mandatory header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major, data[j][i]

  long rows() const { return data.empty() ? 0 : static_cast<long>(data[0].size()); }
};

// Strict reader: ragged rows, non-numeric cells, or duplicate column names
// raise DataError.
CsvTable read_csv(const std::string& path);

// Column mapping: response lives in "y" (continuous, binary, count, Markov
// states) or in "time"/"event" (survival); every other column is a
// covariate, kept in header order.
Dataset dataset_from_csv(const CsvTable& table, ModelTag tag, int markov_k = 0);

}  // namespace argmin

#endif
