#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ffp {

// %.17g round-trips every double exactly.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

// Minimal cursor over tagged-record text like "stable(1.5, 0.5, 1)".
struct TextCursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) throw std::invalid_argument("parse error: expected '" + std::string(1, c) + "' in '" +
                                                 std::string(text) + "'");
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' || text[pos] == '-'))
      ++pos;
    if (start == pos) throw std::invalid_argument("parse error: identifier expected in '" + std::string(text) + "'");
    return std::string(text.substr(start, pos - start));
  }
  double number() {
    skip_ws();
    const char* begin = text.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("parse error: number expected in '" + std::string(text) + "'");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
};

}  // namespace detail

}  // namespace ffp
