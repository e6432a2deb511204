#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapforms/counting.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/form.hpp"

namespace gapforms::exceptional {

/// Delta_F inside Q+/(Q^x)^4: valuations mod 4 of a1..a4 and 4 over the primes dividing 2*a1*a2*a3*a4.
struct DeltaGroup {
  std::vector<std::uint64_t> primes;             // ascending, always contains 2
  std::array<std::vector<int>, 5> generators;    // generators[g][j] = v_{primes[j]}(g) mod 4
};

DeltaGroup delta_group(const DiagonalForm& form);

/// A point of (mu_4^4 / ~) x {+-1}: class U1..U8 and the sign chi(-1).
struct ImagePoint {
  int u_class = 1;
  int u5 = 1;
  auto operator<=>(const ImagePoint&) const = default;
};

std::string to_string(const ImagePoint& pt);

/// K = b + u5 * c for the point's class table row.
int k_value(const ImagePoint& pt);

/// Membership in the set of points with K <= 1 used by the Kummer criterion.
bool allowed(const ImagePoint& pt);

struct ImageEntry {
  ImagePoint point;
  std::uint64_t fiber = 0;  // number of characters of Delta_F mapping to this point
};

/// Image of Hom(Delta_F, mu_4) under chi -> ((chi(a_i))_i / ~, chi(4)), sorted by point.
std::vector<ImageEntry> char_image(const DiagonalForm& form);

struct KummerVerdict {
  bool exceptional = false;
  std::optional<ImageEntry> certificate;  // chosen allowed point when not exceptional
  std::vector<ImageEntry> image;
};

/// Exceptional iff no allowed point is attained. Certificate: largest fiber, then smaller K, then class index.
KummerVerdict is_exceptional_kummer(const DiagonalForm& form);

/// coeffs[perm[0]] = a c1^4, coeffs[perm[1]] = b c2^4, coeffs[perm[2]] = 4a c3^4, coeffs[perm[3]] = 4b c4^4.
struct PatternDecomposition {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::array<std::uint64_t, 4> c{};
  std::array<int, 4> perm{};
};

std::string to_string(const DiagonalForm& form, const PatternDecomposition& d);

struct PatternVerdict {
  bool exceptional = false;
  std::optional<PatternDecomposition> decomposition;
};

PatternVerdict is_exceptional_pattern(const DiagonalForm& form);

struct ProbeReport {
  std::uint64_t q_max = 0;
  std::uint64_t primes_tested = 0;
  bool all_pass = true;
  std::optional<std::uint64_t> failure_prime;
  std::optional<std::uint64_t> failure_count;  // r_F(0, q) at the failure prime
};

/// Checks r_F(0,q) >= q^3 by brute force at every prime q <= q_max not dividing a coefficient.
/// Stops at the first failure.
ProbeReport empirical_exceptional_probe(const DiagonalForm& form, std::uint64_t q_max,
                                        const counting::CountOptions& opts = {});

/// Largest b with b^4 | n.
std::uint64_t fourth_power_part_root(std::uint64_t n);
bool is_fourth_power(std::uint64_t n);

}  // namespace gapforms::exceptional
