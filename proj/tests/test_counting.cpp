#include <doctest.h>

#include "gapforms/arith.hpp"
#include "gapforms/counting.hpp"
#include "gapforms/error.hpp"
#include "support/oracles.hpp"
#include "support/rng.hpp"

using namespace gapforms;
using namespace gapforms::counting;
using gapforms::testing::enumerate_count;
using gapforms::testing::Rng;

namespace {

std::vector<DiagonalForm> small_corpus() {
  std::vector<DiagonalForm> out;
  Rng rng(21);
  for (int i = 0; i < 10; ++i) {
    out.emplace_back(3, std::vector<std::uint64_t>{rng.uniform(1, 10), rng.uniform(1, 10), rng.uniform(1, 10)});
    out.emplace_back(4, std::vector<std::uint64_t>{rng.uniform(1, 10), rng.uniform(1, 10), rng.uniform(1, 10),
                                                   rng.uniform(1, 10)});
  }
  return out;
}

}  // namespace

TEST_CASE("count_brute examples") {
  const DiagonalForm cubic(3, {1, 1, 1});
  CHECK(count_brute(cubic, 0, 2).count == BigNat(4));
  CHECK(count_brute(cubic, 0, 7).count == BigNat(55));
  CHECK(count_brute(cubic, 0, 7).ratio == mpq_class(55, 49));
  CHECK(count_brute(DiagonalForm(4, {1, 1, 1, 1}), 0, 3).count == BigNat(33));
  CHECK_THROWS_AS(count_brute(cubic, 0, 5003), DomainError);
  CHECK(count_brute(cubic, 0, 5003, CountOptions{6000}).count == BigNat(5003ULL * 5003ULL));
}

TEST_CASE("residue_histogram counts solutions of a x^s = v") {
  const auto h = residue_histogram(1, 3, 7);
  CHECK(h == std::vector<std::uint64_t>{1, 3, 0, 0, 0, 0, 3});
  const auto h2 = residue_histogram(3, 4, 13);
  std::uint64_t total = 0;
  for (auto c : h2) total += c;
  CHECK(total == 13);
}

TEST_CASE("count_zero_formula examples") {
  const DiagonalForm cubic(3, {1, 1, 1});
  CHECK(count_zero_formula(cubic, 7).count == BigNat(55));
  CHECK(count_zero_formula(cubic, 13).count == BigNat(109));
  CHECK(count_zero_formula(cubic, 13).method == Method::formula);
  CHECK(count_zero_formula(DiagonalForm(4, {1, 1, 1, 1}), 3).count == BigNat(33));
  CHECK(count_zero_formula(cubic, 5).count == BigNat(25));
  CHECK_THROWS_AS(count_zero_formula(DiagonalForm(3, {1, 1, 7}), 7), DomainError);
}

TEST_CASE("count_general examples") {
  const DiagonalForm cubic(3, {1, 1, 1});
  const auto a = count_general(cubic, 1, 7);
  CHECK(a.exact());
  CHECK(a.count == BigNat(enumerate_count(cubic, 1, 7)));
  const auto b = count_general(cubic, 0, 10007);
  CHECK(b.exact());
  CHECK(b.method == Method::formula);
  const auto c = count_general(cubic, 4, 1000003);
  CHECK_FALSE(c.exact());
  CHECK(c.method == Method::weil);
  const std::uint64_t p = 1000003;
  CHECK(c.interval->lo == BigNat(p * p - 8 * p));
  CHECK(c.interval->hi == BigNat(p * p + 8 * p));
  CHECK(c.count == c.interval->hi);
  const auto d = count_general(cubic, 4, 1000037);  // p = 2 (mod 3): cubing is a bijection
  CHECK(d.exact());
  CHECK(d.count == BigNat(1000037ULL * 1000037ULL));
}

TEST_CASE("count_general on a bad prime above the cap is the trivial interval") {
  const DiagonalForm f(3, {1, 1, 10007});
  const auto r = count_general(f, 5, 10007);
  CHECK_FALSE(r.exact());
  CHECK(r.interval->lo == BigNat(0));
  CHECK(r.interval->hi == pow(BigNat(10007), 3));
}

TEST_CASE("count_squarefree examples") {
  const DiagonalForm cubic(3, {1, 1, 1});
  const std::vector<std::uint64_t> p27{2, 7};
  const auto r = count_squarefree(cubic, BigNat(0), p27);
  CHECK(r.count == BigNat(220));
  CHECK(r.count == BigNat(enumerate_count(cubic, 0, 14)));
  CHECK(r.method == Method::multiplicative);
  CHECK(r.ratio == mpq_class(55, 49));
  const auto one = count_squarefree(cubic, BigNat(0), std::vector<std::uint64_t>{});
  CHECK(one.count == BigNat(1));
  CHECK(one.modulus == BigNat(1));
  const DiagonalForm quartic(4, {1, 1, 1, 1});
  const std::vector<std::uint64_t> p35{3, 5};
  const auto q = count_squarefree(quartic, BigNat(0), p35);
  CHECK(q.count == count_brute(quartic, 0, 3).count * count_brute(quartic, 0, 5).count);
  CHECK(q.count == BigNat(enumerate_count(quartic, 0, 15)));
  const std::vector<std::uint64_t> dup{7, 7};
  CHECK_THROWS_AS(count_squarefree(cubic, BigNat(0), dup), DomainError);
  const std::vector<std::uint64_t> big{1000003};
  CHECK_THROWS_AS(count_squarefree(cubic, BigNat(4), big), DomainError);
}

TEST_CASE("weil_check examples") {
  CHECK(weil_check(DiagonalForm(3, {1, 1, 1}), 7).pass);
  CHECK(weil_check(DiagonalForm(4, {1, 1, 1, 1}), 5).pass);
  CHECK(weil_check(DiagonalForm(3, {2, 3, 5}), 7).pass);
  CHECK(within_weil(3, 7, 56));
  CHECK_FALSE(within_weil(3, 7, 57));
  CHECK(within_weil(4, 5, -81 * 11));  // 81 * 5^(3/2) = 905.6
  CHECK_FALSE(within_weil(4, 5, -906));
}

TEST_CASE("ResidueCounter agrees with direct enumeration for tiny primes") {
  for (const auto& f : small_corpus()) {
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
      if (f.degree() == 4 && p > 11) continue;
      const ResidueCounter rc(f, p);
      for (std::uint64_t m = 0; m < p; ++m) CHECK(rc.at(m) == enumerate_count(f, m, p));
    }
  }
}

TEST_CASE("formula agrees with brute force below 300") {
  for (const auto& f : small_corpus()) {
    for (auto p : arith::primes_in(5, 300)) {
      if (f.bad_prime(p)) continue;
      CHECK(count_zero_formula(f, p).count == count_brute(f, 0, p).count);
    }
  }
}

TEST_CASE("mass conservation: sum over residues is p^s") {
  for (const auto& f : small_corpus()) {
    for (auto p : arith::primes_in(2, 300)) {
      const auto all = ResidueCounter(f, p).all();
      BigNat total(0);
      for (auto c : all) total += BigNat(c);
      CHECK(total == pow(BigNat(p), f.degree()));
    }
  }
}

TEST_CASE("permutation invariance and unit scaling") {
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const int s = rng.uniform(0, 1) ? 3 : 4;
    std::vector<std::uint64_t> c(s);
    for (auto& a : c) a = rng.uniform(1, 30);
    const auto primes = arith::primes_in(3, 200);
    const std::uint64_t p = primes[rng.uniform(0, primes.size() - 1)];
    const std::uint64_t m = rng.uniform(0, p - 1);
    const DiagonalForm f(s, c);
    const auto base = count_brute(f, m, p).count;
    auto perm = c;
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    std::swap(perm[0], perm[s - 1]);
    CHECK(count_brute(DiagonalForm(s, perm), m, p).count == base);
    const std::uint64_t u = rng.uniform(1, p - 1);
    const std::uint64_t us = arith::mod_pow(u, s, p);
    std::vector<std::uint64_t> scaled(s);
    for (int i = 0; i < s; ++i) scaled[i] = c[i] * us % p == 0 ? p : c[i] * us % p;
    bool bad = false;
    for (int i = 0; i < s; ++i) bad = bad || c[i] % p == 0;
    if (bad) continue;
    CHECK(count_brute(DiagonalForm(s, scaled), m * us % p, p).count == base);
  }
}

TEST_CASE("multiplicativity over squarefree moduli") {
  const std::vector<DiagonalForm> forms{DiagonalForm(3, {1, 1, 1}), DiagonalForm(3, {1, 2, 3}),
                                        DiagonalForm(4, {1, 1, 1, 1}), DiagonalForm(4, {1, 2, 3, 4})};
  for (const auto& f : forms) {
    const std::uint64_t limit = f.degree() == 3 ? 40 : 20;
    for (std::uint64_t M = 1; M <= limit; ++M) {
      std::vector<std::uint64_t> primes;
      bool squarefree = true;
      for (auto [p, e] : arith::factor_small(M)) {
        squarefree = squarefree && e == 1;
        primes.push_back(p);
      }
      if (!squarefree) continue;
      for (std::uint64_t m = 0; m < M; m += (M > 10 ? 3 : 1)) {
        CHECK(count_squarefree(f, BigNat(m), primes).count == BigNat(enumerate_count(f, m, M)));
      }
    }
  }
}
