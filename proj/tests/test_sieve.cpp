#include <doctest.h>

#include <sstream>

#include "gapforms/error.hpp"
#include "gapforms/gapcraft.hpp"
#include "gapforms/sieve.hpp"
#include "support/oracles.hpp"
#include "support/rng.hpp"

using namespace gapforms;
using namespace gapforms::sieve;
using gapforms::testing::enumerate_values;
using gapforms::testing::Rng;

namespace {

const DiagonalForm kCubic(3, {1, 1, 1});
const DiagonalForm kQuartic(4, {1, 1, 1, 1});

std::vector<std::uint64_t> set_bits(const ValueBitset& b) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < b.size(); ++i) {
    if (b.test(i)) out.push_back(i);
  }
  return out;
}

gapcraft::GapWitness small_witness(const DiagonalForm& f, int K, std::uint64_t T) {
  gapcraft::SelectionPolicy pol;
  pol.T = T;
  pol.max_primes = 400;
  return gapcraft::build_witness(f, K, mpq_class(1, 2 * K), pol);
}

}  // namespace

TEST_CASE("sieve_values examples") {
  CHECK(set_bits(sieve_values(kCubic, 10)) == std::vector<std::uint64_t>{0, 1, 2, 3, 8, 9});
  CHECK(set_bits(sieve_values(kQuartic, 6)) == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
  CHECK(set_bits(sieve_values(DiagonalForm(3, {2, 3, 5}), 3)) == std::vector<std::uint64_t>{0, 2});
  SieveOptions tiny;
  tiny.budget_bits = 1000;
  CHECK_THROWS_AS(sieve_values(kCubic, 1001, tiny), DomainError);
  CHECK_THROWS_AS(sieve_values(kCubic, 0), DomainError);
}

TEST_CASE("sieve agrees with plain enumeration") {
  Rng rng(51);
  for (int t = 0; t < 30; ++t) {
    const int s = rng.uniform(0, 1) ? 3 : 4;
    std::vector<std::uint64_t> c(s);
    const std::uint64_t base = rng.uniform(1, 4);
    for (auto& a : c) a = rng.uniform(0, 2) ? base : rng.uniform(1, 12);
    const DiagonalForm f(s, c);
    const std::uint64_t N = rng.uniform(1, 200000);
    SieveOptions opts;
    opts.threads = static_cast<unsigned>(rng.uniform(1, 4));
    const auto bits = sieve_values(f, N, opts);
    const auto expect = enumerate_values(f, N);
    std::uint64_t mismatches = 0;
    for (std::uint64_t n = 0; n < N; ++n) mismatches += bits.test(n) != expect[n];
    CHECK_MESSAGE(mismatches == 0, f.to_string() << " N=" << N);
  }
}

TEST_CASE("bitset export round trip") {
  const auto bits = sieve_values(kCubic, 1000);
  std::stringstream ss;
  bits.write(ss);
  const std::string raw = ss.str();
  CHECK(raw.size() == 8 + 125);
  CHECK(raw.substr(0, 3) == "SFB");
  CHECK(raw[3] == 1);
  CHECK(static_cast<unsigned char>(raw[4]) == (1000 & 0xff));
  CHECK(static_cast<unsigned char>(raw[8]) == 0x0f);  // bits 0..3
  std::stringstream in(raw);
  const auto back = ValueBitset::read(in);
  CHECK(back.size() == 1000);
  CHECK(back.words() == bits.words());
  std::stringstream junk("XYZ\x01\x00\x00\x00\x00");
  CHECK_THROWS_AS(ValueBitset::read(junk), DomainError);
}

TEST_CASE("max_gap examples") {
  const auto g = max_gap(sieve_values(kCubic, 100));
  CHECK(g.start == 43);
  CHECK(g.length == 10);
  ValueBitset all(64);
  for (int i = 0; i < 64; ++i) all.set(i);
  CHECK(max_gap(all).length == 0);
  const auto q = max_gap(sieve_values(kQuartic, 16));
  CHECK(q.start == 4);
  CHECK(q.length == 11);
  CHECK_THROWS_AS(max_gap(ValueBitset(0)), DomainError);
}

TEST_CASE("max_gap boundary at 10^6") {
  const auto bits = sieve_values(kCubic, 1000000);
  const auto g = max_gap(bits);
  REQUIRE(g.length > 0);
  CHECK(bits.test(g.start));
  CHECK(bits.test(g.start + g.length + 1));
  CHECK_FALSE(bits.test(g.start + 1));
  CHECK_FALSE(bits.test(g.start + g.length));
  for (std::uint64_t n = g.start + 1; n <= g.start + g.length; ++n) CHECK_FALSE(bits.test(n));
}

TEST_CASE("window_has_value examples") {
  CHECK(window_has_value(kCubic, BigNat(43), 10).representations.empty());
  const auto w = window_has_value(kCubic, BigNat(53), 1);
  REQUIRE(w.representations.size() == 1);
  CHECK(w.representations[0].n == BigNat(54));
  CHECK(kCubic.evaluate(w.representations[0].x) == BigNat(54));
  CHECK(window_has_value(kCubic, BigNat(3), 2).representations.empty());
  CHECK(window_has_value(kCubic, BigNat(0), 3).representations.size() == 3);
}

TEST_CASE("window search agrees with the sieve on every window below 10^5") {
  const std::vector<DiagonalForm> forms{kCubic, DiagonalForm(3, {1, 1, 2}), DiagonalForm(3, {2, 3, 5}),
                                        DiagonalForm(3, {1, 7, 7}), DiagonalForm(3, {3, 4, 5})};
  const std::uint64_t N = 100000, K = 50;
  for (const auto& f : forms) {
    const auto bits = sieve_values(f, N);
    std::uint64_t mismatches = 0;
    for (std::uint64_t A = 0; A + K < N; A += K) {
      const auto win = window_has_value(f, BigNat(A), K);
      std::vector<bool> got(K + 1, false);
      for (const auto& r : win.representations) {
        CHECK(f.evaluate(r.x) == r.n);
        got[(r.n - BigNat(A)).to_u64()] = true;
      }
      for (std::uint64_t i = 1; i <= K; ++i) mismatches += got[i] != bits.test(A + i);
    }
    CHECK_MESSAGE(mismatches == 0, f.to_string());
  }
}

TEST_CASE("find_representation uses an independent order and agrees") {
  Rng rng(52);
  for (int t = 0; t < 300; ++t) {
    const DiagonalForm f = t % 2 ? kCubic : DiagonalForm(4, {1, 2, 3, 4});
    const std::uint64_t n = rng.uniform(0, 50000);
    const auto rep = find_representation(f, BigNat(n));
    const bool in_window = n > 0 && !window_has_value(f, BigNat(n - 1), 1).representations.empty();
    if (n > 0) CHECK(rep.has_value() == in_window);
    if (rep) CHECK(f.evaluate(rep->x) == BigNat(n));
  }
  WindowOptions tight;
  tight.work_limit = 3;
  CHECK_THROWS_AS(find_representation(kCubic, BigNat::from_string("1000000000000000000004"), tight), DomainError);
}

TEST_CASE("windows above 2^60 use exact arithmetic") {
  const DiagonalForm big(3, {2147483647, 2147483646, 2147483645});
  const std::vector<BigNat> x{BigNat(1000), BigNat(999), BigNat(7)};
  const BigNat n = big.evaluate(x);
  REQUIRE(n > pow(BigNat(2), 60));
  const auto win = window_has_value(big, n - BigNat(1), 1);
  REQUIRE(win.complete);
  REQUIRE(win.representations.size() == 1);
  CHECK(big.evaluate(win.representations[0].x) == n);
  const auto rep = find_representation(big, n);
  REQUIRE(rep);
  CHECK(big.evaluate(rep->x) == n);
  CHECK(window_has_value(big, n, 1).representations.empty() == !find_representation(big, n + BigNat(1)).has_value());
}

TEST_CASE("find_explicit_gap on a small witness") {
  const auto w = small_witness(kCubic, 2, 40);
  REQUIRE(w.M < BigNat(1000000000000ULL));
  GapSearchOptions opts;
  opts.stop_at_first = false;
  const auto rep = find_explicit_gap(kCubic, w, 300, opts);
  CHECK(rep.status == SearchStatus::found);
  REQUIRE(rep.a);
  for (std::uint64_t i = 1; i <= 2; ++i) CHECK_FALSE(find_representation(kCubic, *rep.a + BigNat(i)).has_value());
  CHECK(rep.windows_scanned == 300);
  CHECK(rep.transcript.size() == 2);
  const double hit_rate = static_cast<double>(rep.windows_with_value) / 300.0;
  const double bound = std::min(1.0, 2 * w.certified_epsilon.get_d()) + 0.15;
  CHECK(hit_rate <= bound);
  CHECK(to_json(kCubic, rep).find("\"status\": \"found\"") != std::string::npos);
}

TEST_CASE("find_explicit_gap refuses a tampered witness and reports the work limit") {
  auto w = small_witness(kCubic, 2, 40);
  auto bad = w;
  bad.m = bad.m + BigNat(1);
  CHECK_THROWS_AS(find_explicit_gap(kCubic, bad, 10), IntegrityError);
  GapSearchOptions starve;
  starve.work_per_window = 1;
  const auto rep = find_explicit_gap(kCubic, w, 10, starve);
  CHECK(rep.status == SearchStatus::work_limit);
  CHECK_FALSE(rep.a.has_value());
}
