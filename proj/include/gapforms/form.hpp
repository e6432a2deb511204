#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gapforms/bignat.hpp"

namespace gapforms {

/// a_1 x_1^s + ... + a_s x_s^s with s in {3,4} and every a_i >= 1.
class DiagonalForm {
 public:
  static constexpr std::uint64_t kMaxCoefficient = (1ULL << 31) - 1;

  DiagonalForm(int degree, std::vector<std::uint64_t> coeffs);

  /// Grammar: "<degree>:<c1>,<c2>,..." with exactly <degree> coefficients.
  static DiagonalForm parse(std::string_view spec);

  int degree() const { return degree_; }
  std::span<const std::uint64_t> coeffs() const { return coeffs_; }
  std::uint64_t coeff(std::size_t i) const { return coeffs_.at(i); }

  /// True when p divides some coefficient, i.e. p is in Sigma_F.
  bool bad_prime(std::uint64_t p) const;
  /// a_1 * ... * a_s reduced mod p.
  std::uint64_t coeff_product_mod(std::uint64_t p) const;
  /// All coefficients equal, so the value set is symmetric in the variables.
  bool symmetric() const;

  BigNat evaluate(std::span<const BigNat> x) const;
  std::string to_string() const;

  friend bool operator==(const DiagonalForm&, const DiagonalForm&) = default;

 private:
  int degree_;
  std::vector<std::uint64_t> coeffs_;
};

}  // namespace gapforms
