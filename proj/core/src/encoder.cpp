#include "forge/encoder.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"

namespace forge::encoder {

ColumnName encoded_name(const ColumnName& source, const std::string& label) {
  // Labels may contain spaces, so the canonical split comes from re-parsing.
  std::string title = "enc ";
  if (source.reserved == ReservedColumn::region) {
    title += "Region";
  } else {
    title += source.body;
    if (source.subfield) title += " " + *source.subfield;
  }
  title += "_" + label;
  if (source.hist) title += " hist";
  return parse_column_name(title);
}

EncodeResult one_hot(const Table& v3) {
  EncodeResult result;
  TableBuilder builder(v3);
  for (const auto& column : v3.columns()) {
    if (column.name.dtype != Dtype::lbl || column.name.reserved == ReservedColumn::country_name) continue;
    std::set<std::string> distinct;
    for (std::size_t r = 0; r < column.cells.size(); ++r) {
      const auto& cell = column.cells[r];
      if (!cell.is_label()) {
        throw Error(ErrorKind::MissingLabelCell,
                    "'" + column.title + "' has no label for row '" + v3.row_keys()[r] + "'");
      }
      distinct.insert(cell.as_label());
    }

    EncodedColumn plan{column.title, {distinct.begin(), distinct.end()}, {}};
    for (const auto& label : plan.labels) {
      std::vector<CellValue> cells;
      cells.reserve(column.cells.size());
      for (const auto& cell : column.cells) cells.push_back(CellValue::binary(cell.as_label() == label));
      plan.outputs.push_back(builder.add_column(encoded_name(column.name, label), std::move(cells)));
    }
    result.plan.columns.push_back(std::move(plan));
  }
  result.table = std::move(builder).build(Version::v4);
  return result;
}

nlohmann::json to_json(const EncodingPlan& plan) {
  auto out = nlohmann::json::array();
  for (const auto& c : plan.columns) {
    out.push_back({{"source", c.source}, {"labels", c.labels}, {"outputs", c.outputs}});
  }
  return out;
}

}  // namespace forge::encoder
