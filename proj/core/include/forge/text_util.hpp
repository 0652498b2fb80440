#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s) noexcept;
std::string collapse_whitespace(std::string_view s);

/// Replaces every tag with a space and drops a dangling, unterminated tag at
/// the end of the fragment.
std::string strip_tags(std::string_view html);

/// Decodes the handful of HTML entities that occur in the download.
std::string decode_entities(std::string_view s);

/// Removes `<a ...>...</a>` elements whose opening tag mentions "rankorder",
/// along with the "country comparison to the world:" lead-in.
std::string remove_rankings(std::string_view html);

/// Tag-free, entity-decoded, whitespace-collapsed text of a fragment.
std::string clean_text(std::string_view html);

/// Lowercase alphanumeric runs joined by '-': "People and Society" -> "people-and-society".
std::string slugify(std::string_view title);

/// Cuts the text at the first standalone word "note".
std::string_view truncate_at_note(std::string_view s) noexcept;

/// Removes every parenthesised span, including nested ones.
std::string strip_parentheticals(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle) noexcept;

/// Splits on any of the delimiters, trimming pieces and dropping empty ones.
std::vector<std::string> split_any(std::string_view s, const std::vector<std::string>& delimiters);

/// Like split_any but ignores delimiters inside parentheses.
std::vector<std::string> split_top_level(std::string_view s, const std::vector<std::string>& delimiters);

}  // namespace forge::text
