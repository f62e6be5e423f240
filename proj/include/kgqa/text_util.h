#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgqa::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Collapses every run of whitespace into one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool iequals(std::string_view a, std::string_view b);
bool contains_icase(std::string_view haystack, std::string_view needle);

// Text after the last '/' or '#' of an IRI ("" when the IRI ends with one).
std::string_view local_name(std::string_view iri);

// "nearestCity" -> "nearest city", "GND_ID" -> "gnd id", "wikiPageID" ->
// "wiki page id". Output is lowercase words separated by single spaces.
std::string split_identifier(std::string_view identifier);

// Appends the UTF-8 encoding of a code point.
void append_utf8(std::string& out, char32_t cp);

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace kgqa::text
