#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "forge/table.hpp"

namespace forge::encoder {

struct EncodedColumn {
  std::string source;                // lbl column title
  std::vector<std::string> labels;   // sorted, distinct
  std::vector<std::string> outputs;  // enc column titles, parallel to labels
};

struct EncodingPlan {
  std::vector<EncodedColumn> columns;
};

/// "lbl government-legal-system" + "civil law" -> "enc government-legal-system_civil law".
ColumnName encoded_name(const ColumnName& source, const std::string& label);

struct EncodeResult {
  Table table;
  EncodingPlan plan;
};

/// Appends one Binary column per (lbl column, label); lbl columns are kept.
/// Throws MissingLabelCell if an lbl column still holds Missing.
EncodeResult one_hot(const Table& v3);

nlohmann::json to_json(const EncodingPlan& plan);

}  // namespace forge::encoder
