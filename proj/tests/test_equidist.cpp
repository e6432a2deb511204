#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gapforms/counting.hpp"
#include "gapforms/equidist.hpp"
#include "gapforms/error.hpp"

using namespace gapforms;
using namespace gapforms::equidist;

namespace {

ScanOptions no_cache() {
  ScanOptions o;
  o.cache_dir.clear();
  return o;
}

std::filesystem::path fresh_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

const DiagonalForm kCubic(3, {1, 1, 1});
const DiagonalForm kQuartic(4, {1, 1, 1, 1});

}  // namespace

TEST_CASE("scan examples") {
  const auto a = scan(kCubic, 20, no_cache());
  REQUIRE(a.size() == 3);
  CHECK(a[0].p == 7);
  CHECK(a[1].p == 13);
  CHECK(a[2].p == 19);
  const auto b = scan(kCubic, 13, no_cache());
  CHECK(b.back().p == 13);
  CHECK(b.back().re_h == doctest::Approx(-2.5 / std::sqrt(13.0)).epsilon(1e-9));
  const auto c = scan(kQuartic, 6, no_cache());
  REQUIRE(c.size() == 1);
  CHECK(c[0].p == 5);
  CHECK(c[0].k == -5);
  REQUIRE(c[0].class_point);
  CHECK(c[0].class_point->u_class == 1);
  CHECK(c[0].class_point->u5 == -1);
}

TEST_CASE("scan skips primes dividing a coefficient") {
  const auto s = scan(DiagonalForm(3, {1, 7, 13}), 40, no_cache());
  for (const auto& x : s) {
    CHECK(x.p != 7);
    CHECK(x.p != 13);
  }
  CHECK(s.size() == 3);
}

TEST_CASE("samples reproduce the exact zero counts") {
  for (const auto& f : {kCubic, kQuartic, DiagonalForm(4, {1, 2, 3, 5})}) {
    for (const auto& smp : scan(f, 1500, no_cache())) {
      const std::int64_t p = static_cast<std::int64_t>(smp.p);
      const std::int64_t formula = f.degree() == 3 ? p * p + (p - 1) * smp.two_re
                                                   : p * p * p + p * (p - 1) * smp.k + (p - 1) * smp.two_re;
      CHECK(BigNat(static_cast<std::uint64_t>(formula)) == counting::count_brute(f, 0, smp.p).count);
      CHECK(std::abs(smp.re_h) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("threads and chunking do not change results") {
  ScanOptions one = no_cache();
  one.chunk = 5000;
  ScanOptions many = no_cache();
  many.threads = 4;
  many.chunk = 777;
  const auto a = scan(kQuartic, 60000, one);
  const auto b = scan(kQuartic, 60000, many);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == b[i].p);
    CHECK(a[i].two_re == b[i].two_re);
    CHECK(a[i].k == b[i].k);
  }
}

TEST_CASE("density examples") {
  const auto samples = scan(kCubic, 100000, no_cache());
  CHECK(density_from_samples(samples, 100000, 1.0).observed == 1.0);
  CHECK(density_from_samples(samples, 100000, -1.0 + 1e-9).observed < 0.001);
  const auto half = density_from_samples(samples, 100000, 0.0);
  CHECK(half.expected == doctest::Approx(0.5));
  CHECK(half.expected_all_primes == doctest::Approx(0.25));
  CHECK(std::abs(half.observed - 0.5) < 0.03);
  const auto third = density_from_samples(samples, 100000, -0.5);
  CHECK(third.expected == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("restricted quartic density") {
  const exceptional::ImagePoint pt{1, -1};
  const auto rep = density_report(kQuartic, 20000, 0.0, exceptional::ImagePoint{1, -1}, no_cache());
  CHECK(rep.samples > 100);
  for (const auto& s : scan(kQuartic, 20000, no_cache())) {
    if (s.class_point == pt) CHECK(s.k == -5);
  }
  CHECK(rep.observed > 0.3);
  CHECK(rep.observed < 0.7);
}

TEST_CASE("discrepancy examples") {
  const double d5 = discrepancy(kCubic, 100000, no_cache());
  const double d3 = discrepancy(kCubic, 1000, no_cache());
  CHECK(d5 > 0);
  CHECK(d5 < 0.05);
  CHECK(d3 > d5);
  CHECK_THROWS_AS(discrepancy(std::vector<PrimeSample>{}), DomainError);
  CHECK_THROWS_AS(discrepancy(kCubic, 50, no_cache()), DomainError);
}

TEST_CASE("cache round trip and reuse") {
  const auto dir = fresh_dir("gapforms-cache-test");
  ScanOptions opts;
  opts.cache_dir = dir;
  opts.chunk = 10000;
  const auto first = scan(kQuartic, 29999, opts);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 3);
  const auto second = scan(kQuartic, 29999, opts);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].p == second[i].p);
    CHECK(first[i].two_re == second[i].two_re);
    CHECK(first[i].class_point == second[i].class_point);
  }
  const auto path = cache_path(dir, kQuartic, 0, 10000);
  CHECK(std::filesystem::exists(path));
  CHECK(read_cache(path, kQuartic, 0, 10000).has_value());
  CHECK_FALSE(read_cache(path, kCubic, 0, 10000).has_value());
  CHECK_FALSE(read_cache(path, kQuartic, 0, 20000).has_value());
  CHECK(form_hash(kCubic) != form_hash(kQuartic));
  std::filesystem::remove_all(dir);
}
