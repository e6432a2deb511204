#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gapforms/bignat.hpp"
#include "gapforms/counting.hpp"
#include "gapforms/exceptional.hpp"
#include "gapforms/form.hpp"

namespace gapforms::gapcraft {

struct SelectionPolicy {
  mpq_class beta{1, 2};
  std::uint64_t T = 20000;
  std::size_t max_primes = 400;
  std::optional<exceptional::ImagePoint> u_class;  // quartic only
  /// Primes up to this bound get exact counts at every residue; above it cross terms use the Weil endpoint.
  std::uint64_t exact_cap = 20000;
};

struct SelectedPrime {
  std::uint64_t p = 0;
  BigNat zero_count;
  mpq_class zero_ratio;  // r_F(0,p) / p^(s-1)
};

/// Primes p <= T, p = 1 (mod s), p not dividing a coefficient, with
/// r_F(0,p)/p^(s-1) <= 1 - beta (p^(1-s/2) - p^(-s/2)), decided exactly. At most max_primes, ascending.
std::vector<SelectedPrime> select_primes(const DiagonalForm& form, const SelectionPolicy& policy);

/// Exact form of the selection predicate for a single prime's zero count.
bool passes_selection(int s, std::uint64_t p, const BigNat& zero_count, const mpq_class& beta);

struct WeightedPrime {
  std::uint64_t p = 0;
  double weight = 0;  // -log(ratio)
};

/// Greedy largest-first onto the lightest bin. Bins come back as lists of primes.
std::vector<std::vector<std::uint64_t>> partition_bins(const std::vector<WeightedPrime>& primes, int K);

struct PrimeEntry {
  std::uint64_t p = 0;
  int bin = 0;                      // 1-based; m + bin = 0 (mod p)
  std::vector<mpq_class> ratios;    // ratios[i-1] = r_F(m+i, p) / p^(s-1), i = 1..K
  std::vector<bool> exact;          // false where the Weil upper endpoint was used
};

struct GapWitness {
  explicit GapWitness(DiagonalForm f) : form(std::move(f)) {}

  DiagonalForm form;
  int K = 1;
  std::vector<std::vector<std::uint64_t>> bins;
  BigNat m;
  BigNat M;
  std::vector<PrimeEntry> primes;  // ascending by p
  mpq_class certified_epsilon;
  mpq_class target_epsilon;
  bool certified = false;
  std::uint64_t exact_cap = 20000;
  mpq_class beta;
  std::uint64_t T = 0;
};

struct BuildProgress {
  std::size_t candidates_seen = 0;
  std::size_t accepted = 0;
  double log_epsilon = 0;
};

/// Adaptive construction. Candidates are the selected primes in ascending order; each goes to the
/// bin that most lowers sum_i (prod_p ratio_p(i))^4 and is dropped if no bin lowers it. Stops once
/// the exact epsilon reaches the target or the candidates/budget run out (then certified = false).
GapWitness build_witness(const DiagonalForm& form, int K, const mpq_class& target, const SelectionPolicy& policy);

/// Recomputes congruences, per-prime counts and the product; throws IntegrityError on any mismatch.
mpq_class check_witness(const DiagonalForm& form, const GapWitness& w);

/// Per-residue products prod_p ratio_p(i), i = 1..K, from the stored entries.
std::vector<mpq_class> residue_products(const GapWitness& w);

/// gamma K^2 (log K)^4 for s = 3, exp(exp(gamma K log K)) for s = 4.
double tau_bound(int s, double gamma, double K);

struct GapDensity {
  BigNat region;       // L^s M^s
  /// Progression points a = m + hM with a + K < L^s M^s whose window (a, a+K] misses S_F:
  /// at least #windows - L^s sum_i r_F(m+i, M). Equals L^s (M^(s-1) - sum_i r_F(m+i, M)) when m + K < M.
  BigNat guaranteed;
  BigNat half_bound;   // L^s M^(s-1) / 2, rounded up
};

GapDensity gap_density_bound(const DiagonalForm& form, const GapWitness& w, std::uint64_t L);

/// Structured text (JSON, stable key order) for witness files.
std::string to_json(const GapWitness& w);
GapWitness from_json(const std::string& text);

std::string rational_string(const mpq_class& q);
mpq_class parse_rational(const std::string& text);
std::string decimal_string(const mpq_class& q, int digits = 12);

}  // namespace gapforms::gapcraft
