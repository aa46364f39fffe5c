#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "susy/error.hpp"

namespace susy {

/// Exact fraction with 64-bit parts, always reduced with a positive denominator.
/// Overflow is not guarded; the values used here stay tiny.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw InvalidArgument("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  [[nodiscard]] constexpr std::int64_t num() const { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const { return den_; }
  [[nodiscard]] constexpr bool is_integer() const { return den_ == 1; }
  [[nodiscard]] double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  [[nodiscard]] std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
  friend constexpr Rational operator-(Rational a, Rational b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
  friend constexpr Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend constexpr Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw InvalidArgument("Rational: division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  constexpr Rational operator-() const { return {-num_, den_}; }

  friend constexpr bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) { return a.num_ * b.den_ <=> b.num_ * a.den_; }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline Rational abs(Rational r) { return r.num() < 0 ? -r : r; }

/// Exact square root when numerator and denominator are both perfect squares.
inline std::optional<Rational> exact_sqrt(Rational r) {
  if (r.num() < 0) return std::nullopt;
  const auto root = [](std::int64_t v) -> std::optional<std::int64_t> {
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, s - 1); c <= s + 1; ++c)
      if (c * c == v) return c;
    return std::nullopt;
  };
  const auto n = root(r.num());
  const auto d = root(r.den());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

}  // namespace susy
