#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge::csv {

struct Field {
  std::string value;
  bool quoted = false;  // distinguishes `""` (empty string) from an empty field
};

using Record = std::vector<Field>;

/// RFC 4180 reader: CRLF or LF line endings, doubled quotes inside quoted
/// fields, embedded newlines. Throws SchemaMismatch on an unterminated quote.
std::vector<Record> parse(std::string_view data);

/// Quotes when needed (comma, quote, CR/LF, leading/trailing space) or when
/// `force_quote` is set.
std::string escape(std::string_view field, bool force_quote = false);

}  // namespace forge::csv
