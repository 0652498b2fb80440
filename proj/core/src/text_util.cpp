#include "forge/text_util.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace forge::text {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::string strip_tags(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      const auto close = html.find('>', i);
      if (close == std::string_view::npos) break;
      out += ' ';
      i = close + 1;
      continue;
    }
    out += html[i++];
  }
  return out;
}

std::string decode_entities(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kEntities{{
      {"&amp;", "&"},
      {"&lt;", "<"},
      {"&gt;", ">"},
      {"&quot;", "\""},
      {"&#39;", "'"},
      {"&apos;", "'"},
      {"&nbsp;", " "},
      {"&#160;", " "},
  }};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      bool matched = false;
      for (const auto& [entity, replacement] : kEntities) {
        if (s.substr(i, entity.size()) == entity) {
          out += replacement;
          i += entity.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += s[i++];
  }
  return out;
}

std::string remove_rankings(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    if (html.substr(i, 3) == "<a " || html.substr(i, 3) == "<a\t") {
      const auto tag_end = html.find('>', i);
      if (tag_end != std::string_view::npos && contains(html.substr(i, tag_end - i), "rankorder")) {
        const auto close = html.find("</a>", tag_end);
        i = close == std::string_view::npos ? tag_end + 1 : close + 4;
        continue;
      }
    }
    out += html[i++];
  }
  static constexpr std::string_view kLeadIn = "country comparison to the world:";
  for (auto pos = out.find(kLeadIn); pos != std::string::npos; pos = out.find(kLeadIn, pos)) {
    out.erase(pos, kLeadIn.size());
  }
  return out;
}

std::string clean_text(std::string_view html) {
  return std::string(trim(collapse_whitespace(decode_entities(strip_tags(remove_rankings(html))))));
}

std::string slugify(std::string_view title) {
  std::string out;
  bool pending = false;
  for (char c : title) {
    if (is_alnum(c)) {
      if (pending && !out.empty()) out += '-';
      pending = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      pending = true;
    }
  }
  return out;
}

std::string_view truncate_at_note(std::string_view s) noexcept {
  std::size_t pos = 0;
  while ((pos = s.find("note", pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || !is_alpha(s[pos - 1]);
    const bool right_ok = pos + 4 >= s.size() || !is_alpha(s[pos + 4]);
    if (left_ok && right_ok) return s.substr(0, pos);
    pos += 4;
  }
  return s;
}

std::string strip_parentheticals(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
      continue;
    }
    if (c == ')' && depth > 0) {
      --depth;
      continue;
    }
    if (depth == 0) out += c;
  }
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) noexcept {
  return haystack.find(needle) != std::string_view::npos;
}

namespace {

std::vector<std::string> split_impl(std::string_view s, const std::vector<std::string>& delimiters, bool top_level) {
  std::vector<std::string> out;
  std::size_t start = 0;
  int depth = 0;
  auto push = [&](std::size_t end) {
    const auto piece = trim(s.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (std::size_t i = 0; i < s.size();) {
    if (top_level) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')' && depth > 0) --depth;
    }
    bool split = false;
    if (depth == 0) {
      for (const auto& d : delimiters) {
        if (!d.empty() && s.substr(i, d.size()) == d) {
          push(i);
          i += d.size();
          start = i;
          split = true;
          break;
        }
      }
    }
    if (!split) ++i;
  }
  push(s.size());
  return out;
}

}  // namespace

std::vector<std::string> split_any(std::string_view s, const std::vector<std::string>& delimiters) {
  return split_impl(s, delimiters, false);
}

std::vector<std::string> split_top_level(std::string_view s, const std::vector<std::string>& delimiters) {
  return split_impl(s, delimiters, true);
}

}  // namespace forge::text
