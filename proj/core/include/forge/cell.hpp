#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace forge {

struct Missing {
  friend bool operator==(Missing, Missing) = default;
};

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

struct Label {
  std::string value;
  friend bool operator==(const Label&, const Label&) = default;
};

struct Binary {
  std::uint8_t value = 0;  // 0 or 1
  friend bool operator==(Binary, Binary) = default;
};

/// A single table cell. Numbers are always finite; absence is `Missing`.
class CellValue {
 public:
  using Storage = std::variant<Missing, double, Text, Label, Binary>;

  CellValue() = default;
  CellValue(Missing) {}
  /// Throws InvalidCell for NaN or infinite values.
  CellValue(double number);
  CellValue(Text text) : storage_(std::move(text)) {}
  CellValue(Label label) : storage_(std::move(label)) {}
  /// Throws InvalidCell unless value is 0 or 1.
  CellValue(Binary binary);

  static CellValue number(double v) { return CellValue(v); }
  static CellValue text(std::string v) { return CellValue(Text{std::move(v)}); }
  static CellValue label(std::string v) { return CellValue(Label{std::move(v)}); }
  static CellValue binary(bool v) { return CellValue(Binary{static_cast<std::uint8_t>(v ? 1 : 0)}); }

  bool is_missing() const noexcept { return std::holds_alternative<Missing>(storage_); }
  bool is_number() const noexcept { return std::holds_alternative<double>(storage_); }
  bool is_text() const noexcept { return std::holds_alternative<Text>(storage_); }
  bool is_label() const noexcept { return std::holds_alternative<Label>(storage_); }
  bool is_binary() const noexcept { return std::holds_alternative<Binary>(storage_); }

  double as_number() const { return std::get<double>(storage_); }
  const std::string& as_text() const { return std::get<Text>(storage_).value; }
  const std::string& as_label() const { return std::get<Label>(storage_).value; }
  bool as_binary() const { return std::get<Binary>(storage_).value == 1; }

  /// Numeric view used by the models: Number as-is, Binary as 0/1.
  double numeric() const;
  bool is_numeric() const noexcept { return is_number() || is_binary(); }

  /// Text or Label payload; throws for other variants.
  const std::string& string_payload() const;

  const Storage& storage() const noexcept { return storage_; }

  friend bool operator==(const CellValue&, const CellValue&) = default;

 private:
  Storage storage_;
};

/// Debug rendering, e.g. `Number(1.5)` or `Missing`.
std::string describe(const CellValue& cell);

}  // namespace forge
