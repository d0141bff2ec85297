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

#include "relscm/table.h"

#include "relscm/error.h"

namespace relscm {

std::string_view ColumnKindName(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::string_view ColumnRoleName(ColumnRole role) {
  return role == ColumnRole::kFeature ? "feature" : "target";
}

Table::Table(std::vector<Column> columns, size_t row_count)
    : columns_(std::move(columns)), row_count_(row_count) {
  for (const Column& c : columns_) {
    if (c.values.size() != row_count_) {
      throw Error(ErrorCode::kContractViolation,
                  "column " + c.name + " has " +
                      std::to_string(c.values.size()) + " values, expected " +
                      std::to_string(row_count_));
    }
  }
}

std::optional<size_t> Table::FindColumn(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

const Column& Table::column(std::string_view name) const {
  const auto i = FindColumn(name);
  if (!i) {
    throw Error(ErrorCode::kInvalidInput,
                "no column named " + std::string(name));
  }
  return columns_[*i];
}

std::vector<std::string> Table::ColumnNames() const {
  std::vector<std::string> out;
  for (const Column& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<size_t> Table::TargetColumns() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].role == ColumnRole::kTarget) out.push_back(i);
  return out;
}

Table Table::Slice(size_t begin, size_t end) const {
  if (begin > end || end > row_count_) {
    throw Error(ErrorCode::kInvalidParameter, "row slice out of range");
  }
  std::vector<Column> cols = columns_;
  for (Column& c : cols) {
    c.values.assign(c.values.begin() + begin, c.values.begin() + end);
  }
  Table t(std::move(cols), end - begin);
  t.provenance = provenance;
  return t;
}

Table Table::Project(const std::vector<size_t>& column_indices) const {
  std::vector<Column> cols;
  for (size_t i : column_indices) cols.push_back(columns_.at(i));
  Table t(std::move(cols), row_count_);
  t.provenance = provenance;
  return t;
}

}  // namespace relscm
