#include "tmw/money.hpp"

#include <limits>

#include "tmw/error.hpp"

namespace tmw {

Money Money::parse(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorCode::InvalidAmount, "'" + std::string(text) + "' is not an amount");
  };
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() || frac.size() > 2 || (dot != std::string_view::npos && frac.empty())) {
    throw bad();
  }
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max() / 100 - 1;
  std::int64_t units = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw bad();
    units = units * 10 + (c - '0');
    if (units > kMax) throw Error(ErrorCode::InvalidAmount, "amount out of range");
  }
  std::int64_t cents = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    char c = i < frac.size() ? frac[i] : '0';
    if (c < '0' || c > '9') throw bad();
    cents = cents * 10 + (c - '0');
  }
  std::int64_t total = units * 100 + cents;
  return Money(neg ? -total : total);
}

Money Money::from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    return parse(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_number_float()) {
    // dump() yields the shortest round-trip text, e.g. 2.5 -> "2.5".
    return parse(j.dump());
  }
  if (j.is_string()) return parse(j.get<std::string>());
  throw Error(ErrorCode::InvalidAmount, "expected a number, found " + j.dump());
}

std::string Money::to_string() const {
  std::uint64_t mag = cents_ < 0 ? 0 - static_cast<std::uint64_t>(cents_)
                                 : static_cast<std::uint64_t>(cents_);
  std::string frac = std::to_string(mag % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (cents_ < 0 ? "-" : "") + std::to_string(mag / 100) + "." + frac;
}

Money Money::operator+(Money other) const {
  std::int64_t out = 0;
  if (__builtin_add_overflow(cents_, other.cents_, &out)) {
    throw Error(ErrorCode::InvalidAmount, "amount overflow");
  }
  return Money(out);
}

Money billing_total(std::span<const Money> item_costs, Money shipping_costs) {
  Money total;
  for (Money m : item_costs) {
    if (m.negative()) throw Error(ErrorCode::NegativeAmount, m.to_string());
    total += m;
  }
  if (shipping_costs.negative()) {
    throw Error(ErrorCode::NegativeAmount, shipping_costs.to_string());
  }
  return total + shipping_costs;
}

}  // namespace tmw
