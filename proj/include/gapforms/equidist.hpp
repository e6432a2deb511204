#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gapforms/exceptional.hpp"
#include "gapforms/form.hpp"

namespace gapforms::equidist {

struct PrimeSample {
  std::uint64_t p = 0;
  std::int64_t two_re = 0;  // 2 Re of the H numerator, exact
  double re_h = 0;
  int k = 0;                                           // quartic only
  std::optional<exceptional::ImagePoint> class_point;  // quartic only
};

struct ScanOptions {
  /// Empty disables the on-disk cache. Defaults to $GAPFORMS_CACHE_DIR when set.
  std::filesystem::path cache_dir = default_cache_dir();
  unsigned threads = 1;
  std::uint64_t chunk = 1 << 17;

  static std::filesystem::path default_cache_dir();
};

/// One sample per prime p <= T with p = 1 (mod s) and p not dividing a coefficient, ascending.
std::vector<PrimeSample> scan(const DiagonalForm& form, std::uint64_t T, const ScanOptions& opts = {});

PrimeSample sample_at(const DiagonalForm& form, std::uint64_t p);

struct DensityReport {
  std::uint64_t T = 0;
  double beta = 0;
  std::uint64_t samples = 0;  // after restriction
  std::uint64_t hits = 0;
  double observed = 0;
  double expected = 0;              // arccos(-beta)/pi, relative to the scanned progression
  double expected_all_primes = 0;   // the same density measured against all primes
  double discrepancy = 0;
  std::optional<exceptional::ImagePoint> restriction;
};

DensityReport density_report(const DiagonalForm& form, std::uint64_t T, double beta,
                             std::optional<exceptional::ImagePoint> restriction = std::nullopt,
                             const ScanOptions& opts = {});

/// Same, over samples already in hand.
DensityReport density_from_samples(const std::vector<PrimeSample>& samples, std::uint64_t T, double beta,
                                   std::optional<exceptional::ImagePoint> restriction = std::nullopt);

/// Max over windows [phi_i, phi_j] of a 64-window grid on [0, pi] of |observed - (phi_j - phi_i)/pi|
/// for the angles arccos(Re H).
double discrepancy(const std::vector<PrimeSample>& samples);
double discrepancy(const DiagonalForm& form, std::uint64_t T, const ScanOptions& opts = {});

/// Cache file naming and I/O; exposed for tests.
std::uint64_t form_hash(const DiagonalForm& form);
std::filesystem::path cache_path(const std::filesystem::path& dir, const DiagonalForm& form, std::uint64_t lo,
                                 std::uint64_t hi);
void write_cache(const std::filesystem::path& path, const DiagonalForm& form, std::uint64_t lo, std::uint64_t hi,
                 const std::vector<PrimeSample>& samples);
std::optional<std::vector<PrimeSample>> read_cache(const std::filesystem::path& path, const DiagonalForm& form,
                                                   std::uint64_t lo, std::uint64_t hi);

}  // namespace gapforms::equidist
