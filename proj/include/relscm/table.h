// Copyright 2026 The relscm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELSCM_TABLE_H_
#define RELSCM_TABLE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relscm {

enum class ColumnKind { kNumeric, kCategorical };
enum class ColumnRole { kFeature, kTarget };

std::string_view ColumnKindName(ColumnKind kind);
std::string_view ColumnRoleName(ColumnRole role);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  ColumnRole role = ColumnRole::kFeature;
  // Categorical values are stored as exact integers in [0, category_count).
  std::vector<double> values;
  int category_count = 0;
  // Content hash of the codebook behind a categorical column; equal ids
  // mean identical category semantics across tables.
  std::string codebook_id;

  bool categorical() const { return kind == ColumnKind::kCategorical; }
  bool operator==(const Column&) const = default;
};

struct Provenance {
  std::string schema_fingerprint;
  uint64_t master_seed = 0;
  std::string run_tag;

  bool operator==(const Provenance&) const = default;
};

class Table {
 public:
  Table() = default;
  Table(std::vector<Column> columns, size_t row_count);

  size_t row_count() const { return row_count_; }
  size_t column_count() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(size_t i) const { return columns_[i]; }
  Column& mutable_column(size_t i) { return columns_[i]; }

  std::optional<size_t> FindColumn(std::string_view name) const;
  const Column& column(std::string_view name) const;

  std::vector<std::string> ColumnNames() const;
  std::vector<size_t> TargetColumns() const;

  // Rows [begin, end) as a new table.
  Table Slice(size_t begin, size_t end) const;
  // Subset of columns in the given order.
  Table Project(const std::vector<size_t>& column_indices) const;

  Provenance provenance;

  bool operator==(const Table& other) const {
    return row_count_ == other.row_count_ && columns_ == other.columns_;
  }

 private:
  std::vector<Column> columns_;
  size_t row_count_ = 0;
};

}  // namespace relscm

#endif  // RELSCM_TABLE_H_
