#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

namespace ghim {

/// Non-negative amount in millisatoshis. All arithmetic is checked: overflow
/// and negative results raise `Error` instead of wrapping.
class Money {
 public:
  using rep = std::uint64_t;

  constexpr Money() noexcept = default;

  static constexpr Money msat(rep amount) noexcept { return Money(amount); }
  static constexpr Money sat(rep amount) { return Money(amount * 1000); }
  static constexpr Money zero() noexcept { return Money(0); }
  static constexpr Money max() noexcept { return Money(std::numeric_limits<rep>::max()); }

  constexpr rep msat() const noexcept { return amount_; }
  constexpr bool is_zero() const noexcept { return amount_ == 0; }

  friend constexpr auto operator<=>(Money, Money) noexcept = default;

  Money& operator+=(Money other);
  Money& operator-=(Money other);

 private:
  constexpr explicit Money(rep amount) noexcept : amount_(amount) {}

  rep amount_ = 0;
};

Money money_add(Money a, Money b);
Money money_sub(Money a, Money b);

inline Money operator+(Money a, Money b) { return money_add(a, b); }
inline Money operator-(Money a, Money b) { return money_sub(a, b); }

/// Rounds a non-negative real amount of msat to the nearest integer; values that
/// do not fit raise an overflow error.
Money money_from_real(double msat);

std::string to_string(Money m);
std::ostream& operator<<(std::ostream& os, Money m);

}  // namespace ghim

template <>
struct std::hash<ghim::Money> {
  std::size_t operator()(ghim::Money m) const noexcept { return std::hash<std::uint64_t>{}(m.msat()); }
};
