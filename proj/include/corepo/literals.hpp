#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corepo/rational.hpp"
#include "corepo/text.hpp"

namespace corepo {

// Small Python-style literal grammar used to compare predicted program
// outputs against references: numbers, quoted strings, True/False, None,
// lists, tuples, arbitrarily nested. Comparison is structural; a tuple never
// equals a list and a boolean never equals a number. When either side fails
// to parse, callers fall back to whitespace-normalized string equality.

struct Literal {
  enum class Kind { None, Bool, Number, String, List, Tuple };
  Kind kind = Kind::None;
  bool bool_value = false;
  bool number_exact = false;   // value holds the number exactly
  Rational value;              // set when number_exact
  std::string number_raw;      // normalized digits text, used when !number_exact
  std::string string_value;    // decoded characters
  std::vector<Literal> items;  // list / tuple elements
};

namespace literal_detail {

struct ParseFail {};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Literal run() {
    skip_ws();
    Literal v = value();
    skip_ws();
    if (!done()) throw ParseFail{};
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!done() && is_space(text_[pos_])) ++pos_;
  }

  bool match_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) != w) return false;
    std::size_t after = pos_ + w.size();
    if (after < text_.size() && (std::isalnum((unsigned char)text_[after]) || text_[after] == '_'))
      return false;
    pos_ = after;
    return true;
  }

  Literal value() {
    skip_ws();
    if (done()) throw ParseFail{};
    char c = peek();
    if (c == '[') return sequence(']', Literal::Kind::List);
    if (c == '(') return paren();
    if (c == '\'' || c == '"') return string_lit(c);
    if (match_word("None")) return Literal{};
    if (match_word("True")) return bool_lit(true);
    if (match_word("False")) return bool_lit(false);
    if (c == '+' || c == '-' || c == '.' || (c >= '0' && c <= '9')) return number();
    throw ParseFail{};
  }

  static Literal bool_lit(bool b) {
    Literal v;
    v.kind = Literal::Kind::Bool;
    v.bool_value = b;
    return v;
  }

  // '[' handled by the caller; closer is ']' or ')'.
  Literal sequence(char closer, Literal::Kind kind) {
    ++pos_;  // opener
    Literal v;
    v.kind = kind;
    skip_ws();
    if (!done() && peek() == closer) {
      ++pos_;
      return v;
    }
    for (;;) {
      v.items.push_back(value());
      skip_ws();
      if (done()) throw ParseFail{};
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        if (!done() && peek() == closer) {  // trailing comma
          ++pos_;
          return v;
        }
        continue;
      }
      if (peek() == closer) {
        ++pos_;
        return v;
      }
      throw ParseFail{};
    }
  }

  // Python parenthesis rules: "()" is the empty tuple, "(x)" is just x, and
  // a tuple of one needs the trailing comma "(x,)".
  Literal paren() {
    std::size_t save = pos_;
    ++pos_;
    skip_ws();
    if (!done() && peek() == ')') {
      ++pos_;
      Literal v;
      v.kind = Literal::Kind::Tuple;
      return v;
    }
    Literal first = value();
    skip_ws();
    if (!done() && peek() == ')') {
      ++pos_;
      return first;  // parenthesized scalar
    }
    pos_ = save;
    return sequence(')', Literal::Kind::Tuple);
  }

  Literal string_lit(char quote) {
    ++pos_;
    Literal v;
    v.kind = Literal::Kind::String;
    while (!done() && peek() != quote) {
      char c = text_[pos_++];
      if (c == '\\' && !done()) {
        char e = text_[pos_++];
        switch (e) {
          case 'n': v.string_value.push_back('\n'); break;
          case 't': v.string_value.push_back('\t'); break;
          case 'r': v.string_value.push_back('\r'); break;
          case 'b': v.string_value.push_back('\b'); break;
          case 'f': v.string_value.push_back('\f'); break;
          case '0': v.string_value.push_back('\0'); break;
          case '\\': v.string_value.push_back('\\'); break;
          case '\'': v.string_value.push_back('\''); break;
          case '"': v.string_value.push_back('"'); break;
          case 'x': {
            if (pos_ + 1 < text_.size() && std::isxdigit((unsigned char)text_[pos_]) &&
                std::isxdigit((unsigned char)text_[pos_ + 1])) {
              auto hex = [](char h) {
                if (h >= '0' && h <= '9') return h - '0';
                if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                return h - 'A' + 10;
              };
              v.string_value.push_back((char)(hex(text_[pos_]) * 16 + hex(text_[pos_ + 1])));
              pos_ += 2;
            } else {
              v.string_value.push_back('\\');
              v.string_value.push_back('x');
            }
            break;
          }
          default:
            // Unknown escape: keep both characters verbatim.
            v.string_value.push_back('\\');
            v.string_value.push_back(e);
        }
      } else {
        v.string_value.push_back(c);
      }
    }
    if (done()) throw ParseFail{};
    ++pos_;  // closing quote
    return v;
  }

  Literal number() {
    std::size_t start = pos_;
    if (!done() && (peek() == '+' || peek() == '-')) ++pos_;
    std::size_t digits_begin = pos_;
    while (!done() && peek() >= '0' && peek() <= '9') ++pos_;
    if (!done() && peek() == '.') {
      ++pos_;
      while (!done() && peek() >= '0' && peek() <= '9') ++pos_;
    }
    if (pos_ == digits_begin || (pos_ == digits_begin + 1 && text_[digits_begin] == '.'))
      throw ParseFail{};
    std::string_view mantissa = text_.substr(start, pos_ - start);
    long long exp10 = 0;
    bool has_exp = false;
    if (!done() && (peek() == 'e' || peek() == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      bool neg = false;
      if (!done() && (peek() == '+' || peek() == '-')) {
        neg = peek() == '-';
        ++pos_;
      }
      std::size_t exp_begin = pos_;
      while (!done() && peek() >= '0' && peek() <= '9') ++pos_;
      if (pos_ == exp_begin) {
        pos_ = save;  // bare 'e' is not part of the number
      } else {
        has_exp = true;
        for (std::size_t i = exp_begin; i < pos_; ++i) {
          exp10 = exp10 * 10 + (text_[i] - '0');
          if (exp10 > 400) break;  // magnitude beyond exact range
        }
        if (neg) exp10 = -exp10;
      }
    }

    Literal v;
    v.kind = Literal::Kind::Number;
    v.number_raw = std::string(text_.substr(start, pos_ - start));
    try {
      Rational m = parse_rational(mantissa);
      if (has_exp) {
        Rational scale(1);
        Rational ten(10);
        long long n = exp10 < 0 ? -exp10 : exp10;
        for (long long i = 0; i < n; ++i) scale = scale * ten;
        m = exp10 < 0 ? m / scale : m * scale;
      }
      v.value = m;
      v.number_exact = true;
    } catch (const rational_overflow&) {
      v.number_exact = false;
    } catch (const Error&) {
      v.number_exact = false;
    }
    return v;
  }
};

}  // namespace literal_detail

// Parses one complete literal; nullopt when the text is not a literal.
inline std::optional<Literal> parse_literal(std::string_view text) {
  try {
    literal_detail::Parser p(text);
    return p.run();
  } catch (const literal_detail::ParseFail&) {
    return std::nullopt;
  } catch (const rational_divzero&) {
    return std::nullopt;
  }
}

inline bool literal_equal(const Literal& a, const Literal& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Literal::Kind::None:
      return true;
    case Literal::Kind::Bool:
      return a.bool_value == b.bool_value;
    case Literal::Kind::Number:
      if (a.number_exact && b.number_exact) return a.value == b.value;
      return a.number_raw == b.number_raw;
    case Literal::Kind::String:
      return a.string_value == b.string_value;
    case Literal::Kind::List:
    case Literal::Kind::Tuple: {
      if (a.items.size() != b.items.size()) return false;
      for (std::size_t i = 0; i < a.items.size(); ++i)
        if (!literal_equal(a.items[i], b.items[i])) return false;
      return true;
    }
  }
  return false;
}

// Canonical text form, used as the answer-class key so structurally equal
// literals vote together.
inline std::string literal_canonical_text(const Literal& v) {
  switch (v.kind) {
    case Literal::Kind::None:
      return "None";
    case Literal::Kind::Bool:
      return v.bool_value ? "True" : "False";
    case Literal::Kind::Number:
      return v.number_exact ? v.value.str() : v.number_raw;
    case Literal::Kind::String: {
      std::string out = "'";
      for (char c : v.string_value) {
        switch (c) {
          case '\\': out += "\\\\"; break;
          case '\'': out += "\\'"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\r': out += "\\r"; break;
          default: out.push_back(c);
        }
      }
      out.push_back('\'');
      return out;
    }
    case Literal::Kind::List:
    case Literal::Kind::Tuple: {
      bool tuple = v.kind == Literal::Kind::Tuple;
      std::string out(1, tuple ? '(' : '[');
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i > 0) out += ", ";
        out += literal_canonical_text(v.items[i]);
      }
      if (tuple && v.items.size() == 1) out.push_back(',');
      out.push_back(tuple ? ')' : ']');
      return out;
    }
  }
  return "";
}

// Structural equality when both sides parse; otherwise whitespace-normalized
// string equality.
inline bool compare_crux_literal(std::string_view predicted, std::string_view expected) {
  auto p = parse_literal(predicted);
  auto e = parse_literal(expected);
  if (p && e) return literal_equal(*p, *e);
  return normalize_whitespace(predicted) == normalize_whitespace(expected);
}

}  // namespace corepo
