#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corepo/error.hpp"
#include "corepo/rational.hpp"
#include "corepo/text.hpp"

namespace corepo {

// Game-of-24 expression checking. An expression is valid when it parses, its
// leaves as a multiset equal the four given numbers, and it evaluates to
// exactly 24 in rational arithmetic. Checks run in that order, so a verdict
// carries the first failure only.

enum class Game24Reason {
  Valid,
  ParseError,
  MultisetMismatch,
  DivisionByZero,
  WrongValue,
};

inline const char* game24_reason_name(Game24Reason r) {
  switch (r) {
    case Game24Reason::Valid: return "valid";
    case Game24Reason::ParseError: return "parse";
    case Game24Reason::MultisetMismatch: return "multiset";
    case Game24Reason::DivisionByZero: return "divzero";
    case Game24Reason::WrongValue: return "value";
  }
  return "unknown";
}

struct Game24Expr {
  struct Node {
    char op = 0;  // '+', '-', '*', '/'; 0 marks a leaf
    std::int64_t leaf = 0;
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;
  };
  std::unique_ptr<Node> root;
  std::vector<std::int64_t> leaves;  // literals in source order
  std::string source;
};

struct Game24Verdict {
  bool valid = false;
  Game24Reason reason = Game24Reason::ParseError;
  std::size_t position = 0;  // byte offset of the failure for parse errors
  std::string value;         // exact value ("22", "48/5") when evaluation ran
  std::vector<std::int64_t> leaves;  // filled once parsing succeeds
};

namespace game24_detail {

struct ParseFail {
  std::size_t pos;
};

// Grammar: expr := term (('+'|'-') term)*
//          term := factor (('*'|'/') factor)*
//          factor := integer | '(' expr ')'
// An optional "= 24" suffix is accepted after the expression. The UTF-8
// glyphs for multiplication, division, and minus are treated as aliases of
// the ASCII operators.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::unique_ptr<Game24Expr::Node> run(std::vector<std::int64_t>& leaves) {
    skip_ws();
    auto node = expr(leaves);
    skip_ws();
    if (!done() && peek() == '=') {
      ++pos_;
      skip_ws();
      std::size_t rhs_at = pos_;
      if (integer() != 24) throw ParseFail{rhs_at};
      skip_ws();
    }
    if (!done()) throw ParseFail{pos_};
    return node;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!done() && is_space(text_[pos_])) ++pos_;
  }

  bool match_bytes(std::string_view s) {
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  // Returns the ASCII operator at the cursor and advances, or 0.
  char match_op(bool additive) {
    if (done()) return 0;
    char c = peek();
    if (additive) {
      if (c == '+' || c == '-') {
        ++pos_;
        return c;
      }
      if (match_bytes("\xe2\x88\x92")) return '-';  // U+2212
    } else {
      if (c == '*' || c == '/') {
        ++pos_;
        return c;
      }
      if (match_bytes("\xc3\x97")) return '*';  // U+00D7
      if (match_bytes("\xc3\xb7")) return '/';  // U+00F7
    }
    return 0;
  }

  static std::unique_ptr<Game24Expr::Node> make_op(char op,
                                                   std::unique_ptr<Game24Expr::Node> l,
                                                   std::unique_ptr<Game24Expr::Node> r) {
    auto n = std::make_unique<Game24Expr::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  std::unique_ptr<Game24Expr::Node> expr(std::vector<std::int64_t>& leaves) {
    auto node = term(leaves);
    for (;;) {
      skip_ws();
      char op = match_op(true);
      if (op == 0) return node;
      skip_ws();
      node = make_op(op, std::move(node), term(leaves));
    }
  }

  std::unique_ptr<Game24Expr::Node> term(std::vector<std::int64_t>& leaves) {
    auto node = factor(leaves);
    for (;;) {
      skip_ws();
      char op = match_op(false);
      if (op == 0) return node;
      skip_ws();
      node = make_op(op, std::move(node), factor(leaves));
    }
  }

  std::unique_ptr<Game24Expr::Node> factor(std::vector<std::int64_t>& leaves) {
    skip_ws();
    if (done()) throw ParseFail{pos_};
    if (peek() == '(') {
      ++pos_;
      auto node = expr(leaves);
      skip_ws();
      if (done() || peek() != ')') throw ParseFail{pos_};
      ++pos_;
      return node;
    }
    std::int64_t n = integer();
    leaves.push_back(n);
    auto node = std::make_unique<Game24Expr::Node>();
    node->leaf = n;
    return node;
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    while (!done() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == start) throw ParseFail{start};
    return detail::parse_i64(text_.substr(start, pos_ - start));
  }
};

}  // namespace game24_detail

// Parses "<expr> [= 24]". On failure returns nullopt and reports the byte
// offset of the first unparsable position.
inline std::optional<Game24Expr> parse_game24(std::string_view text,
                                              std::size_t& error_position) {
  Game24Expr out;
  out.source = std::string(text);
  try {
    game24_detail::Parser p(text);
    out.root = p.run(out.leaves);
  } catch (const game24_detail::ParseFail& f) {
    error_position = f.pos;
    return std::nullopt;
  } catch (const rational_overflow&) {
    error_position = 0;
    return std::nullopt;
  }
  return out;
}

// Exact evaluation; throws rational_divzero on a zero denominator.
inline Rational eval_game24(const Game24Expr::Node& n) {
  if (n.op == 0) return Rational(n.leaf);
  Rational l = eval_game24(*n.lhs);
  Rational r = eval_game24(*n.rhs);
  switch (n.op) {
    case '+': return l + r;
    case '-': return l - r;
    case '*': return l * r;
    case '/': return l / r;
  }
  raise(ErrorKind::Internal, "unknown operator node");
}

inline Game24Verdict verify_game24(std::string_view expr_text,
                                   const std::vector<std::int64_t>& given) {
  if (given.size() != 4)
    raise(ErrorKind::Usage, "verify_game24 expects exactly four given numbers");

  Game24Verdict out;
  std::size_t err_pos = 0;
  auto expr = parse_game24(expr_text, err_pos);
  if (!expr) {
    out.reason = Game24Reason::ParseError;
    out.position = err_pos;
    return out;
  }
  out.leaves = expr->leaves;

  std::vector<std::int64_t> a = expr->leaves;
  std::vector<std::int64_t> b = given;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    out.reason = Game24Reason::MultisetMismatch;
    return out;
  }

  Rational value;
  try {
    value = eval_game24(*expr->root);
  } catch (const rational_divzero&) {
    out.reason = Game24Reason::DivisionByZero;
    return out;
  } catch (const rational_overflow&) {
    // An overflowing value cannot be 24.
    out.reason = Game24Reason::WrongValue;
    return out;
  }
  out.value = value.str();
  if (value != Rational(24)) {
    out.reason = Game24Reason::WrongValue;
    return out;
  }
  out.valid = true;
  out.reason = Game24Reason::Valid;
  return out;
}

}  // namespace corepo
