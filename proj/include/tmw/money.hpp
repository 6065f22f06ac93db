#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace tmw {

// Exact decimal amount with two fractional digits, stored as cents.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }

  // Accepts "12", "12.5", "12.50", optionally signed. More than two
  // fractional digits, exponents or junk raise InvalidAmount.
  static Money parse(std::string_view text);

  // A JSON number or numeric string.
  static Money from_json(const nlohmann::json& j);

  constexpr std::int64_t cents() const noexcept { return cents_; }
  constexpr bool negative() const noexcept { return cents_ < 0; }

  std::string to_string() const;

  Money operator+(Money other) const;
  Money& operator+=(Money other) { return *this = *this + other; }

  auto operator<=>(const Money&) const = default;

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}

  std::int64_t cents_ = 0;
};

// Total cost of the ordered items plus their shipping cost.
Money billing_total(std::span<const Money> item_costs, Money shipping_costs);

}  // namespace tmw
