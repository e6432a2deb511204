#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gapforms/bignat.hpp"
#include "gapforms/form.hpp"
#include "gapforms/gapcraft.hpp"

namespace gapforms::sieve {

/// Bit n is set iff n is a value of F at nonnegative integers, for 0 <= n < N.
class ValueBitset {
 public:
  explicit ValueBitset(std::uint64_t n = 0) : n_(n), words_((n + 63) / 64, 0) {}

  std::uint64_t size() const { return n_; }
  bool test(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  std::uint64_t count() const;
  ValueBitset& operator|=(const ValueBitset& o);
  const std::vector<std::uint64_t>& words() const { return words_; }

  /// "SFB", version byte, N as u32 little-endian, then bit n at byte n/8, bit n%8.
  void write(std::ostream& out) const;
  static ValueBitset read(std::istream& in);

 private:
  std::uint64_t n_;
  std::vector<std::uint64_t> words_;
};

struct SieveOptions {
  std::uint64_t budget_bits = std::uint64_t{1} << 30;
  unsigned threads = 1;
};

ValueBitset sieve_values(const DiagonalForm& form, std::uint64_t N, const SieveOptions& opts = {});

/// Longest run of unset bits in [0, N): the run is start+1 .. start+length. Length 0 when every bit is set.
struct Gap {
  std::uint64_t start = 0;
  std::uint64_t length = 0;
};

Gap max_gap(const ValueBitset& bits);

struct Representation {
  BigNat n;
  std::vector<BigNat> x;
};

struct ValueWindow {
  BigNat A;
  std::uint64_t K = 0;
  std::vector<Representation> representations;  // one per represented n, ascending in n
  std::uint64_t work = 0;
  bool complete = true;  // false when the work limit stopped the search
};

struct WindowOptions {
  std::uint64_t work_limit = 0;  // loop iterations; 0 means unlimited
};

/// All n in (A, A+K] with F(x) = n for some x >= 0, each with one representation re-evaluated exactly.
ValueWindow window_has_value(const DiagonalForm& form, const BigNat& A, std::uint64_t K,
                             const WindowOptions& opts = {});

/// Representation of n found with the variables in the opposite nesting order, or nullopt.
std::optional<Representation> find_representation(const DiagonalForm& form, const BigNat& n,
                                                  const WindowOptions& opts = {});

enum class SearchStatus { found, exhausted, work_limit };
std::string to_string(SearchStatus s);

struct GapSearchReport {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<BigNat> a;          // the gap is a+1 .. a+K
  std::uint64_t h = 0;              // a = m + (h-1) M
  std::uint64_t windows_scanned = 0;
  std::uint64_t windows_with_value = 0;
  mpq_class certified_epsilon;
  std::uint64_t K = 0;
  std::uint64_t work = 0;
  std::vector<std::string> transcript;  // re-verification steps for the reported gap
};

struct GapSearchOptions {
  std::uint64_t work_per_window = 200'000'000;
  bool stop_at_first = true;
};

/// Scans a = m + (h-1)M for h = 1..hMax after check_witness; the first empty window is re-verified
/// number by number with an independent search before it is reported.
GapSearchReport find_explicit_gap(const DiagonalForm& form, const gapcraft::GapWitness& w, std::uint64_t h_max,
                                  const GapSearchOptions& opts = {});

std::string to_json(const DiagonalForm& form, const GapSearchReport& rep);

}  // namespace gapforms::sieve
