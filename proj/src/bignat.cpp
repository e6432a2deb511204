#include "gapforms/bignat.hpp"

#include <ostream>

#include "gapforms/error.hpp"

namespace gapforms {

BigNat::BigNat(std::uint64_t v) {
  // mpz_class has no portable uint64 constructor on every platform.
  mpz_import(value_.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
}

BigNat::BigNat(const mpz_class& v) : value_(v) {
  if (value_ < 0) throw DomainError("BigNat: negative value " + v.get_str());
}

BigNat BigNat::from_string(std::string_view decimal) {
  if (decimal.empty()) throw DomainError("BigNat: empty decimal string");
  for (char c : decimal) {
    if (c < '0' || c > '9') {
      throw DomainError("BigNat: not a nonnegative decimal integer: '" + std::string(decimal) + "'");
    }
  }
  BigNat out;
  out.value_.set_str(std::string(decimal), 10);
  return out;
}

bool BigNat::fits_u64() const { return mpz_sizeinbase(value_.get_mpz_t(), 2) <= 64; }

std::uint64_t BigNat::to_u64() const {
  if (!fits_u64()) throw DomainError("BigNat: value exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, value_.get_mpz_t());
  return out;
}

std::uint64_t BigNat::mod(std::uint64_t m) const {
  if (m == 0) throw DomainError("BigNat: modulus zero");
  mpz_class r;
  mpz_class mm = BigNat(m).value_;
  mpz_mod(r.get_mpz_t(), value_.get_mpz_t(), mm.get_mpz_t());
  return BigNat(r).to_u64();
}

std::size_t BigNat::bit_length() const {
  if (value_ == 0) return 0;
  return mpz_sizeinbase(value_.get_mpz_t(), 2);
}

BigNat& BigNat::operator+=(const BigNat& o) {
  value_ += o.value_;
  return *this;
}

BigNat& BigNat::operator-=(const BigNat& o) {
  if (o.value_ > value_) throw DomainError("BigNat: subtraction underflow");
  value_ -= o.value_;
  return *this;
}

BigNat& BigNat::operator*=(const BigNat& o) {
  value_ *= o.value_;
  return *this;
}

BigNat operator/(const BigNat& a, const BigNat& b) {
  if (b.value_ == 0) throw DomainError("BigNat: division by zero");
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.value_.get_mpz_t(), b.value_.get_mpz_t());
  return BigNat(q);
}

BigNat operator%(const BigNat& a, const BigNat& b) {
  if (b.value_ == 0) throw DomainError("BigNat: division by zero");
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.value_.get_mpz_t(), b.value_.get_mpz_t());
  return BigNat(r);
}

std::strong_ordering operator<=>(const BigNat& a, const BigNat& b) {
  int c = cmp(a.value_, b.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const BigNat& v) { return os << v.value_.get_str(); }

BigNat pow(const BigNat& base, unsigned exponent) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.mpz().get_mpz_t(), exponent);
  return BigNat(out);
}

}  // namespace gapforms
