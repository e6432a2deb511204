#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapforms/bignat.hpp"
#include "gapforms/form.hpp"

namespace gapforms::counting {

enum class Method { brute, formula, multiplicative, weil };
std::string to_string(Method m);

struct CountInterval {
  BigNat lo;
  BigNat hi;
};

/// r_F(m, M). When `interval` is set the exact count is unknown: `count` holds the
/// upper endpoint and `ratio` is that endpoint over M^(s-1).
struct CountResult {
  BigNat count;
  Method method = Method::brute;
  mpq_class ratio;
  BigNat modulus;
  std::optional<CountInterval> interval;

  bool exact() const { return !interval.has_value(); }
};

struct CountOptions {
  std::uint64_t brute_cap = 5000;
};

/// All residue counts r_F(., p) from per-variable power histograms. Setup is a
/// sparse convolution of the first variables; each lookup is a single dot product.
class ResidueCounter {
 public:
  ResidueCounter(const DiagonalForm& form, std::uint64_t p);

  std::uint64_t prime() const { return p_; }
  std::uint64_t at(std::uint64_t m) const;
  std::vector<std::uint64_t> all() const;

 private:
  std::uint64_t p_;
  std::vector<std::uint64_t> left_;                                 // dense, first half of the variables
  std::vector<std::pair<std::uint32_t, std::uint64_t>> right_;      // sparse, remaining variables
};

/// #{x in Z/p : a x^s = v} for every v, as a dense vector of length p.
std::vector<std::uint64_t> residue_histogram(std::uint64_t a, int s, std::uint64_t p);

CountResult count_brute(const DiagonalForm& form, std::uint64_t m, std::uint64_t p,
                        const CountOptions& opts = {});

/// r_F(0, p) without enumeration, from Jacobi sums, the class table or the Legendre symbol.
CountResult count_zero_formula(const DiagonalForm& form, std::uint64_t p);

/// Exact count if any exact path applies, otherwise the Weil interval (or [0, p^s]
/// when p divides a coefficient and is above the brute-force cap).
CountResult count_general(const DiagonalForm& form, std::uint64_t m, std::uint64_t p,
                          const CountOptions& opts = {});

CountResult count_squarefree(const DiagonalForm& form, const BigNat& m, std::span<const std::uint64_t> primes,
                             const CountOptions& opts = {});

struct WeilReport {
  std::uint64_t p = 0;
  bool pass = true;
  std::int64_t max_deviation = 0;  // signed r - p^(s-1) of largest magnitude
  std::uint64_t worst_residue = 0;
  double bound = 0;                // (s-1)^s p^((s-1)/2), for display; the check itself is exact
  std::vector<std::uint64_t> violations;
};

WeilReport weil_check(const DiagonalForm& form, std::uint64_t p, const CountOptions& opts = {});

/// |r - p^(s-1)| <= (s-1)^s p^((s-1)/2), decided in integers.
bool within_weil(int s, std::uint64_t p, std::int64_t deviation);

}  // namespace gapforms::counting
