#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "hette/core.hpp"

namespace hette {

struct ColumnNames {
  std::string outcome = "outcome";
  std::string treatment = "treatment";
  std::string instrument = "instrument";
  std::string covariate = "covariate";
};

struct DatasetOptions {
  ColumnNames columns;
  std::optional<CovariateKind> kind;  // inferred when empty
  std::size_t max_discrete_levels = 20;
};

struct Dataset {
  Sample sample;
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;  // rows with a missing required value
  std::size_t distinct_covariate_values = 0;
  char delimiter = ',';
};

/// Comma- or tab-delimited text with a header row. The delimiter is taken
/// from the header. Empty, "NA", "NaN" and "." fields count as missing and
/// drop the row. Throws InputError with the 1-based line number on
/// malformed input, or naming a missing column.
Dataset read_dataset(std::istream& in, const DatasetOptions& options = {});
Dataset read_dataset_file(const std::string& path, const DatasetOptions& options = {});

void write_dataset(std::ostream& out, const Sample& sample, const ColumnNames& columns = {});

}  // namespace hette
