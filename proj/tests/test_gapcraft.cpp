#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <set>

#include "gapforms/arith.hpp"
#include "gapforms/equidist.hpp"
#include "gapforms/error.hpp"
#include "gapforms/gapcraft.hpp"
#include "support/oracles.hpp"
#include "support/rng.hpp"

using namespace gapforms;
using namespace gapforms::gapcraft;
using gapforms::testing::Rng;

namespace {

const DiagonalForm kCubic(3, {1, 1, 1});
const DiagonalForm kQuartic(4, {1, 1, 1, 1});

SelectionPolicy policy(std::uint64_t T, std::size_t max_primes, mpq_class beta = mpq_class(1, 2)) {
  SelectionPolicy p;
  p.T = T;
  p.max_primes = max_primes;
  p.beta = beta;
  return p;
}

bool contains(const std::vector<SelectedPrime>& v, std::uint64_t p) {
  return std::any_of(v.begin(), v.end(), [p](const auto& s) { return s.p == p; });
}

}  // namespace

TEST_CASE("select_primes examples") {
  const auto a = select_primes(kCubic, policy(20, 100, 1));
  CHECK(contains(a, 13));
  CHECK_FALSE(contains(a, 7));
  CHECK_THROWS_AS(select_primes(DiagonalForm(4, {1, 1, 4, 4}), policy(1000, 10)), DomainError);
  const auto c = select_primes(kQuartic, policy(10000, 1000));
  CHECK_FALSE(c.empty());
  for (const auto& s : c) CHECK(s.zero_ratio < 1);
  CHECK_THROWS_AS(select_primes(kCubic, policy(100, 10, 0)), DomainError);
  CHECK_THROWS_AS(select_primes(kCubic, policy(100, 10, mpq_class(3, 2))), DomainError);
}

TEST_CASE("selection is the scan filtered by the exact predicate") {
  for (const auto& f : {kCubic, DiagonalForm(3, {1, 2, 5}), kQuartic, DiagonalForm(4, {1, 2, 3, 5})}) {
    const mpq_class beta(1, 3);
    const auto chosen = select_primes(f, policy(5000, 100000, beta));
    equidist::ScanOptions opts;
    opts.cache_dir.clear();
    std::vector<std::uint64_t> expect;
    for (const auto& smp : equidist::scan(f, 5000, opts)) {
      const std::int64_t p = static_cast<std::int64_t>(smp.p);
      const std::int64_t r = f.degree() == 3 ? p * p + (p - 1) * smp.two_re
                                             : p * p * p + p * (p - 1) * smp.k + (p - 1) * smp.two_re;
      if (passes_selection(f.degree(), smp.p, BigNat(static_cast<std::uint64_t>(r)), beta)) expect.push_back(smp.p);
    }
    std::vector<std::uint64_t> got;
    for (const auto& s : chosen) got.push_back(s.p);
    CHECK(got == expect);
  }
}

TEST_CASE("passes_selection boundary is exact") {
  // Cubic: ratio <= 1 - beta (p^{-1/2} - p^{-3/2}) iff p^2 - r >= beta (p-1) sqrt(p).
  CHECK(passes_selection(3, 13, BigNat(109), mpq_class(1)));
  CHECK_FALSE(passes_selection(3, 7, BigNat(55), mpq_class(1, 100)));
  CHECK(passes_selection(3, 7, BigNat(49), mpq_class(1, 1000000)) == false);
  // Quartic: (q^3 - r) >= beta q (q-1); q = 5, beta = 1 needs r <= 105.
  CHECK(passes_selection(4, 5, BigNat(105), mpq_class(1)));
  CHECK_FALSE(passes_selection(4, 5, BigNat(106), mpq_class(1)));
}

TEST_CASE("partition_bins examples") {
  CHECK(partition_bins({{13, 0.4}}, 1) == std::vector<std::vector<std::uint64_t>>{{13}});
  const auto b = partition_bins({{7, 3}, {13, 2}, {19, 2}}, 2);
  CHECK(b == std::vector<std::vector<std::uint64_t>>{{7}, {13, 19}});
  CHECK_THROWS_AS(partition_bins({{7, 1}}, 2), DomainError);
}

TEST_CASE("partition_bins: disjoint cover with the greedy balance guarantee") {
  Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    const int K = static_cast<int>(rng.uniform(1, 5));
    const std::size_t n = rng.uniform(K, 30);
    std::vector<WeightedPrime> in;
    double total = 0, biggest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = static_cast<double>(rng.uniform(1, 1000)) / 100.0;
      in.push_back({1000 + i, w});
      total += w;
      biggest = std::max(biggest, w);
    }
    const auto bins = partition_bins(in, K);
    REQUIRE(bins.size() == static_cast<std::size_t>(K));
    std::set<std::uint64_t> seen;
    double min_load = 1e300;
    for (const auto& bin : bins) {
      CHECK_FALSE(bin.empty());
      double load = 0;
      for (auto p : bin) {
        CHECK(seen.insert(p).second);
        load += in[p - 1000].weight;
      }
      min_load = std::min(min_load, load);
    }
    CHECK(seen.size() == n);
    CHECK(min_load >= total / K - biggest - 1e-9);
  }
}

TEST_CASE("build_witness: single prime certificate") {
  const auto w = build_witness(kCubic, 1, mpq_class(9, 10), SelectionPolicy{});
  REQUIRE(w.primes.size() == 1);
  CHECK(w.primes[0].p == 13);
  CHECK(w.certified_epsilon == mpq_class(109, 169));
  CHECK(w.certified);
  CHECK(w.M == BigNat(13));
  CHECK(w.m == BigNat(12));
  CHECK(check_witness(kCubic, w) == w.certified_epsilon);
}

TEST_CASE("build_witness: K = 2 reaches 1/4 and survives serialization") {
  const auto w = build_witness(kCubic, 2, mpq_class(1, 4), SelectionPolicy{});
  CHECK(w.certified);
  CHECK(w.certified_epsilon <= mpq_class(1, 4));
  CHECK(check_witness(kCubic, w) == w.certified_epsilon);
  const auto back = from_json(to_json(w));
  CHECK(back.m == w.m);
  CHECK(back.M == w.M);
  CHECK(back.bins == w.bins);
  CHECK(check_witness(kCubic, back) == w.certified_epsilon);
  CHECK(to_json(back) == to_json(w));
  for (const auto& e : w.primes) {
    CHECK((w.m + BigNat(e.bin)).mod(e.p) == 0);
  }
  const auto prod = residue_products(w);
  CHECK(*std::max_element(prod.begin(), prod.end()) == w.certified_epsilon);
}

TEST_CASE("build_witness: quartic run certifies or flags a partial result") {
  const auto w = build_witness(kQuartic, 2, mpq_class(1, 4), policy(3000, 200));
  CHECK(w.certified_epsilon < 1);
  CHECK(w.certified == (w.certified_epsilon <= mpq_class(1, 4)));
  CHECK(check_witness(kQuartic, w) == w.certified_epsilon);
  const auto tight = build_witness(kCubic, 3, mpq_class(1, 1000), policy(200, 10));
  CHECK_FALSE(tight.certified);
  CHECK(check_witness(kCubic, tight) == tight.certified_epsilon);
}

TEST_CASE("check_witness rejects tampering") {
  const auto w = build_witness(kCubic, 2, mpq_class(1, 4), SelectionPolicy{});
  auto moved = w;
  moved.m = moved.m + BigNat(1);
  CHECK_THROWS_WITH_AS(check_witness(kCubic, moved), doctest::Contains("(mod"), IntegrityError);

  auto j = nlohmann::ordered_json::parse(to_json(w));
  const auto victim = j["primes"][3]["p"].get<std::uint64_t>();
  j["primes"][3]["ratios"][0] = "1/2";
  const auto bad = from_json(j.dump());
  const std::string name = std::to_string(victim);
  CHECK_THROWS_WITH_AS(check_witness(kCubic, bad), doctest::Contains(name.c_str()), IntegrityError);

  auto dup = w;
  dup.primes.push_back(dup.primes.front());
  CHECK_THROWS_AS(check_witness(kCubic, dup), IntegrityError);

  auto eps = w;
  eps.certified_epsilon = mpq_class(1, 5);
  CHECK_THROWS_AS(check_witness(kCubic, eps), IntegrityError);

  CHECK_THROWS_AS(check_witness(DiagonalForm(3, {1, 1, 2}), w), IntegrityError);
  CHECK_THROWS_AS(from_json("{\"format\": \"something else\"}"), DomainError);
  CHECK_THROWS_AS(from_json("not json"), DomainError);
}

TEST_CASE("witness soundness against histogram counts mod M") {
  Rng rng(42);
  int built = 0;
  for (int t = 0; built < 8 && t < 200; ++t) {
    const bool cubic = rng.uniform(0, 2) != 0;
    std::vector<std::uint64_t> c(cubic ? 3 : 4);
    for (auto& a : c) a = rng.uniform(1, 4);
    const DiagonalForm f(cubic ? 3 : 4, c);
    if (!cubic && exceptional::is_exceptional_kummer(f).exceptional) continue;
    const int K = static_cast<int>(rng.uniform(1, 3));
    SelectionPolicy pol = policy(rng.uniform(30, 120), rng.uniform(1, 3), mpq_class(1, 4));
    GapWitness w(f);
    try {
      w = build_witness(f, K, mpq_class(1, 100), pol);
    } catch (const DomainError&) {
      continue;
    }
    if (w.M > BigNat(20000) || w.primes.empty()) continue;
    ++built;
    const std::uint64_t M = w.M.to_u64();
    const auto prod = residue_products(w);
    const BigNat Ms1 = pow(w.M, f.degree() - 1);
    for (int i = 1; i <= K; ++i) {
      const std::uint64_t direct = gapforms::testing::histogram_count(f, w.m.to_u64() + i, M);
      mpq_class ratio(mpz_class(std::to_string(direct)), Ms1.mpz());
      ratio.canonicalize();
      CHECK(ratio == prod[i - 1]);
    }
  }
  CHECK(built >= 5);
}

TEST_CASE("tau_bound examples") {
  CHECK(tau_bound(3, 1, 2) == doctest::Approx(4 * std::pow(std::log(2.0), 4)));
  CHECK(tau_bound(4, 1, 2) == doctest::Approx(std::exp(4.0)));
  CHECK(tau_bound(3, 1, std::exp(1.0)) == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("gap_density_bound examples") {
  const auto w = build_witness(kCubic, 2, mpq_class(1, 4), SelectionPolicy{});
  const auto d1 = gap_density_bound(kCubic, w, 1);
  CHECK(d1.region == pow(w.M, 3));
  CHECK(d1.guaranteed >= d1.half_bound);
  CHECK(d1.half_bound * BigNat(2) >= pow(w.M, 2));
  const auto d2 = gap_density_bound(kCubic, w, 2);
  CHECK(d2.region == BigNat(8) * d1.region);
  CHECK(d2.guaranteed >= BigNat(8) * d1.half_bound);
  const auto loose = build_witness(kCubic, 1, mpq_class(9, 10), SelectionPolicy{});
  CHECK_THROWS_AS(gap_density_bound(kCubic, loose, 1), DomainError);
}

TEST_CASE("gap_density_bound counts real gap starts on a small witness") {
  // With L = 1 the guarantee must not exceed the true number of empty progression windows.
  const auto w = build_witness(kQuartic, 2, mpq_class(1, 4), SelectionPolicy{});
  REQUIRE(w.M.fits_u64());
  const std::uint64_t M = w.M.to_u64();
  const auto d = gap_density_bound(kQuartic, w, 1);
  const std::uint64_t region = d.region.to_u64();
  const auto values = gapforms::testing::enumerate_values(kQuartic, region + 3);
  std::uint64_t empty = 0;
  for (std::uint64_t a = w.m.to_u64(); a + 2 < region; a += M) {
    if (!values[a + 1] && !values[a + 2]) ++empty;
  }
  CHECK(BigNat(empty) >= d.guaranteed);
}

TEST_CASE("rational helpers") {
  CHECK(rational_string(mpq_class(6, 4)) == "3/2");
  CHECK(parse_rational("109/169") == mpq_class(109, 169));
  CHECK(parse_rational("3") == mpq_class(3));
  CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
  CHECK_THROWS_AS(parse_rational("x/2"), DomainError);
  CHECK(decimal_string(mpq_class(109, 169), 6) == "0.644970");
}
