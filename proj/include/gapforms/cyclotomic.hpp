#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gapforms/form.hpp"

namespace gapforms::cyclo {

/// a + b*zeta_s in Z[zeta_s], s in {3,4}. For s = 3, zeta^2 = -1 - zeta; for s = 4, zeta = i.
class CyclotomicInt {
 public:
  CyclotomicInt(int degree, std::int64_t a, std::int64_t b);
  static CyclotomicInt zeta_power(int degree, int k);

  int degree() const { return degree_; }
  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }

  CyclotomicInt conj() const;
  std::int64_t norm() const;
  /// Twice the real part, which is always an integer in this basis.
  std::int64_t two_re() const;
  std::complex<double> to_complex() const;

  CyclotomicInt operator+(const CyclotomicInt& o) const;
  CyclotomicInt operator-(const CyclotomicInt& o) const;
  CyclotomicInt operator*(const CyclotomicInt& o) const;
  CyclotomicInt operator*(std::int64_t k) const;
  bool operator==(const CyclotomicInt& o) const = default;

 private:
  int degree_;
  std::int64_t a_;
  std::int64_t b_;
};

/// Sum of counts[k] * zeta^k for k in [0, s).
CyclotomicInt from_power_counts(int degree, std::span<const std::int64_t> counts);

/// A prime p = 1 (mod s) together with the smallest positive root of x^2+x+1 (s=3)
/// or x^2+1 (s=4) mod p. The root is the image of zeta_s, which fixes the prime
/// above p and hence the character chi_{s,p}.
struct PrimeCharContext {
  int s = 0;
  std::uint64_t p = 0;
  std::uint64_t root = 0;
  std::array<std::uint64_t, 4> unity{};  // root^k mod p
};

PrimeCharContext make_context(int s, std::uint64_t p);

/// Exponent k with chi(a) = zeta^k, or nullopt when p | a.
std::optional<int> chi(const PrimeCharContext& ctx, std::int64_t a);

/// chi exponents for every t in [0, p); entry 0 is -1 (chi(0) = 0).
std::vector<std::int8_t> char_table(const PrimeCharContext& ctx);

/// J(chi^e1, chi^e2) by direct summation over t1 + t2 = 1.
CyclotomicInt jacobi_sum(const PrimeCharContext& ctx, int e1, int e2);

/// J_0(chi^e_1, ..., chi^e_l) by enumerating all tuples with t_1 + ... + t_l = 0.
CyclotomicInt j0_sum(const PrimeCharContext& ctx, std::span<const int> exps);

/// pi_{s,p} = J(chi, chi) via lattice reduction of the prime above p and the
/// known normalisation of Jacobi sums. O(log p); agrees with jacobi_sum(ctx,1,1).
CyclotomicInt pi_prime(const PrimeCharContext& ctx);

std::complex<double> gauss_sum(const PrimeCharContext& ctx, int e);

/// conj(chi)(a_1...a_s) * pi (cubic) or conj(chi)(a_1...a_4) * pi^2 (quartic).
/// h_term is this divided by sqrt(p) resp. p.
CyclotomicInt h_numerator(const DiagonalForm& form, const PrimeCharContext& ctx);
std::complex<double> h_term(const DiagonalForm& form, const PrimeCharContext& ctx);

/// Exponents of (chi(a1),...,chi(a4)) as powers of i, plus chi(-1) in {0, 2}.
struct Mu4Tuple {
  std::array<int, 4> e{};
  int e5 = 0;
  bool operator==(const Mu4Tuple&) const = default;
};

struct TupleClass {
  int index = 0;  // 1..8, the U_i label
  int b = 0;
  int c = 0;
  bool operator==(const TupleClass&) const = default;
};

struct ClassRow {
  int index;
  std::array<int, 4> representative;
  int b;
  int c;
};

/// The eight classes of mu_4^4 under permutation, common scaling and conjugation.
const std::array<ClassRow, 8>& class_table();

/// Canonical representative of the class of a quadruple of exponents.
std::array<int, 4> canonical_tuple(std::array<int, 4> exps);

TupleClass classify_tuple(std::array<int, 4> exps);

/// (b, c) computed from the defining symmetric sums over S_4. Independent of class_table().
std::pair<int, int> symmetric_bc(std::array<int, 4> exps);

Mu4Tuple character_point(const DiagonalForm& form, const PrimeCharContext& ctx);

/// K = b + chi(-1) c for the class of chi(a). Requires a quartic form and q = 1 (mod 4).
int k_term(const DiagonalForm& form, const PrimeCharContext& ctx);

}  // namespace gapforms::cyclo
