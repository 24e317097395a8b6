#pragma once

// Brute-force Game-of-24 oracle used to cross-check the verifier. Kept
// deliberately independent: its own fraction arithmetic, its own search over
// every ordering, operator assignment, and parenthesization.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace oracle24 {

struct Frac {
  long long num = 0;
  long long den = 1;
};

inline Frac make_frac(long long n, long long d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return {n, d};
}

inline Frac add(Frac a, Frac b) { return make_frac(a.num * b.den + b.num * a.den, a.den * b.den); }
inline Frac sub(Frac a, Frac b) { return make_frac(a.num * b.den - b.num * a.den, a.den * b.den); }
inline Frac mul(Frac a, Frac b) { return make_frac(a.num * b.num, a.den * b.den); }
inline std::optional<Frac> div(Frac a, Frac b) {
  if (b.num == 0) return std::nullopt;
  return make_frac(a.num * b.den, a.den * b.num);
}

inline bool is24(Frac f) { return f.num == 24 && f.den == 1; }

struct Item {
  Frac v;
  std::string expr;
};

inline std::optional<std::string> search(std::vector<Item> items) {
  if (items.size() == 1) {
    if (is24(items[0].v)) return items[0].expr;
    return std::nullopt;
  }
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<Item> rest;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i && k != j) rest.push_back(items[k]);
      const Item& a = items[i];
      const Item& b = items[j];
      const char ops[] = {'+', '-', '*', '/'};
      for (char op : ops) {
        // Commutative ops only need one visit per unordered pair.
        if ((op == '+' || op == '*') && i > j) continue;
        std::optional<Frac> v;
        switch (op) {
          case '+': v = add(a.v, b.v); break;
          case '-': v = sub(a.v, b.v); break;
          case '*': v = mul(a.v, b.v); break;
          case '/': v = div(a.v, b.v); break;
        }
        if (!v) continue;
        std::vector<Item> next = rest;
        next.push_back({*v, "(" + a.expr + " " + op + " " + b.expr + ")"});
        if (auto found = search(std::move(next))) return found;
      }
    }
  }
  return std::nullopt;
}

// Fully parenthesized expression evaluating to 24 over exactly the given
// numbers, or nullopt when no arrangement works.
inline std::optional<std::string> solve(const std::vector<std::int64_t>& numbers) {
  std::vector<Item> items;
  items.reserve(numbers.size());
  for (long long n : numbers) items.push_back({make_frac(n, 1), std::to_string(n)});
  return search(std::move(items));
}

}  // namespace oracle24
