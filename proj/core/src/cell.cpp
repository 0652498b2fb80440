#include "forge/cell.hpp"

#include <cmath>
#include <cstdio>

#include "forge/error.hpp"

namespace forge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownDtype: return "UnknownDtype";
    case ErrorKind::MalformedMape: return "MalformedMape";
    case ErrorKind::MalformedName: return "MalformedName";
    case ErrorKind::DuplicateColumn: return "DuplicateColumn";
    case ErrorKind::InvalidCell: return "InvalidCell";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::EmptyDirectory: return "EmptyDirectory";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::AllActualsZero: return "AllActualsZero";
    case ErrorKind::NoCompleteColumns: return "NoCompleteColumns";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InsufficientRows: return "InsufficientRows";
    case ErrorKind::AllFoldsUnassessable: return "AllFoldsUnassessable";
    case ErrorKind::MissingLabelCell: return "MissingLabelCell";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

CellValue::CellValue(double number) : storage_(number) {
  if (!std::isfinite(number)) {
    throw Error(ErrorKind::InvalidCell, "number cells must be finite");
  }
}

CellValue::CellValue(Binary binary) : storage_(binary) {
  if (binary.value > 1) {
    throw Error(ErrorKind::InvalidCell, "binary cells must be 0 or 1");
  }
}

double CellValue::numeric() const {
  if (is_number()) return as_number();
  if (is_binary()) return as_binary() ? 1.0 : 0.0;
  throw Error(ErrorKind::TypeMismatch, "cell " + describe(*this) + " is not numeric");
}

const std::string& CellValue::string_payload() const {
  if (is_text()) return as_text();
  if (is_label()) return as_label();
  throw Error(ErrorKind::TypeMismatch, "cell " + describe(*this) + " carries no string");
}

std::string describe(const CellValue& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Missing>) {
          return "Missing";
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "Number(%.17g)", v);
          return buf;
        } else if constexpr (std::is_same_v<T, Text>) {
          return "Text(" + v.value + ")";
        } else if constexpr (std::is_same_v<T, Label>) {
          return "Label(" + v.value + ")";
        } else {
          return v.value ? "Binary(1)" : "Binary(0)";
        }
      },
      cell.storage());
}

}  // namespace forge
