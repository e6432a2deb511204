#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace gapforms {

/// Arbitrary-precision nonnegative integer. Subtraction below zero throws.
class BigNat {
 public:
  BigNat() = default;
  BigNat(std::uint64_t v);  // NOLINT(google-explicit-constructor)
  explicit BigNat(const mpz_class& v);

  /// Parses a plain decimal string (no sign, no whitespace).
  static BigNat from_string(std::string_view decimal);

  std::string to_string() const { return value_.get_str(); }
  const mpz_class& mpz() const { return value_; }

  bool fits_u64() const;
  std::uint64_t to_u64() const;  // throws if it does not fit
  std::uint64_t mod(std::uint64_t m) const;
  std::size_t bit_length() const;
  bool is_zero() const { return value_ == 0; }

  BigNat& operator+=(const BigNat& o);
  BigNat& operator-=(const BigNat& o);
  BigNat& operator*=(const BigNat& o);

  friend BigNat operator+(BigNat a, const BigNat& b) { return a += b; }
  friend BigNat operator-(BigNat a, const BigNat& b) { return a -= b; }
  friend BigNat operator*(BigNat a, const BigNat& b) { return a *= b; }
  friend BigNat operator/(const BigNat& a, const BigNat& b);
  friend BigNat operator%(const BigNat& a, const BigNat& b);

  friend bool operator==(const BigNat& a, const BigNat& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const BigNat& a, const BigNat& b);

  friend std::ostream& operator<<(std::ostream& os, const BigNat& v);

 private:
  mpz_class value_;
};

BigNat pow(const BigNat& base, unsigned exponent);

}  // namespace gapforms
