#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relicmp/types.hpp"

namespace relicmp {

struct CsvOptions {
  bool header = false;
  std::optional<std::string> group_col;  // column name (with --header) or 1-based index
};

struct NamedMatrix {
  std::string name;
  Matrix data;
};

/// Reads a rectangular numeric CSV: one row per examinee, one column per
/// item. Empty cells and NA tokens raise MissingData with the (row, column)
/// location; ragged rows raise NonRectangular; anything non-numeric raises
/// ParseError.
Matrix ingest_csv(const std::string& path, const CsvOptions& options = {});

/// Splits one file into group matrices on the group column, preserving the
/// file's row order within each group. Groups are ordered by first appearance.
std::vector<NamedMatrix> ingest_grouped_csv(const std::string& path, const CsvOptions& options);

}  // namespace relicmp
