#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "underreport/model.hpp"

namespace underreport {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputTable {
  Dataset data;
  std::vector<std::string> covariate_names;
  bool has_a_true = false;
  BinaryVector a_true;  // populated when the file carries the truth column
};

// Header columns y and a_obs are required, a_obs2 and a_true are recognized
// when present, and every other column is a covariate in file order unless
// covariate_override names an explicit subset.  Cells must be complete and
// numeric; y/a_obs/a_obs2/a_true must be exactly 0 or 1.  Violations raise
// CsvError with the data row (1-based, header excluded) and column name.
InputTable parse_input_csv(const std::string& text,
                           const std::vector<std::string>& covariate_override = {});

InputTable read_input_csv(const std::string& path,
                          const std::vector<std::string>& covariate_override = {});

// columns y,a_obs[,a_obs2][,a_true],x1..xd with \n line endings
std::string format_dataset_csv(const Dataset& data,
                               const BinaryVector* a_true = nullptr);

// write-temp-then-rename so readers never observe a partial file
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace underreport
