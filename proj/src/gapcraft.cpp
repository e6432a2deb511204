#include "gapforms/gapcraft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gapforms/arith.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/error.hpp"

namespace gapforms::gapcraft {

namespace {

mpz_class upow(std::uint64_t p, int e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), p, static_cast<unsigned long>(e));
  return out;
}

void require_usable(const DiagonalForm& form) {
  if (form.degree() == 4 && exceptional::is_exceptional_kummer(form).exceptional) {
    throw DomainError("exceptional form " + form.to_string() +
                      ": r_F(0,q) >= q^3 at every good prime, so no prime can lower the count");
  }
}

void require_beta(const mpq_class& beta) {
  if (beta <= 0 || beta > 1) throw DomainError("beta must lie in (0, 1]");
}

struct RatioAt {
  mpq_class ratio;
  bool exact = true;
};

// Ratios r_F(res, p) / p^(s-1) for each requested residue.
std::vector<RatioAt> ratios_at(const DiagonalForm& form, std::uint64_t p, const std::vector<std::uint64_t>& residues,
                               std::uint64_t exact_cap) {
  const int s = form.degree();
  const mpz_class denom = upow(p, s - 1);
  std::vector<RatioAt> out;
  auto make = [&](const BigNat& count, bool exact) {
    mpq_class q(count.mpz(), denom);
    q.canonicalize();
    return RatioAt{q, exact};
  };
  if (p <= exact_cap) {
    const counting::ResidueCounter counter(form, p);
    for (auto r : residues) out.push_back(make(BigNat(counter.at(r)), true));
    return out;
  }
  for (auto r : residues) {
    const auto res = counting::count_general(form, r, p, counting::CountOptions{exact_cap});
    out.push_back(make(res.count, res.exact()));
  }
  return out;
}

// Residue of m + i mod p when m = -bin (mod p).
std::uint64_t offset_residue(int i, int bin, std::uint64_t p) {
  const std::int64_t d = static_cast<std::int64_t>(i) - bin;
  return arith::reduce(d, p);
}

}  // namespace

bool passes_selection(int s, std::uint64_t p, const BigNat& zero_count, const mpq_class& beta) {
  const mpz_class P(static_cast<unsigned long>(p));
  const mpz_class& r = zero_count.mpz();
  const mpz_class& num = beta.get_num();
  const mpz_class& den = beta.get_den();
  if (s == 3) {
    // r/p^2 <= 1 - beta(p^-1/2 - p^-3/2)  <=>  D = p^2 - r >= beta (p-1) sqrt(p)
    const mpz_class D = P * P - r;
    if (D < 0) return false;
    return D * D * den * den >= num * num * (P - 1) * (P - 1) * P;
  }
  // r/q^3 <= 1 - beta(q^-1 - q^-2)  <=>  q^3 - r >= beta q (q-1)
  const mpz_class D = P * P * P - r;
  return D * den >= num * P * (P - 1);
}

std::vector<SelectedPrime> select_primes(const DiagonalForm& form, const SelectionPolicy& policy) {
  require_beta(policy.beta);
  require_usable(form);
  const int s = form.degree();
  if (policy.u_class && s != 4) throw DomainError("a u-class restriction applies to quartic forms only");
  std::vector<SelectedPrime> out;
  for (auto p : arith::primes_in(2, policy.T + 1)) {
    if (out.size() >= policy.max_primes) break;
    if (p % s != 1 || form.bad_prime(p)) continue;
    if (policy.u_class) {
      const auto ctx = cyclo::make_context(4, p);
      const auto pt = cyclo::character_point(form, ctx);
      const exceptional::ImagePoint here{cyclo::classify_tuple(pt.e).index, pt.e5 == 0 ? 1 : -1};
      if (here != *policy.u_class) continue;
    }
    const auto zero = counting::count_zero_formula(form, p);
    if (!passes_selection(s, p, zero.count, policy.beta)) continue;
    out.push_back({p, zero.count, zero.ratio});
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> partition_bins(const std::vector<WeightedPrime>& primes, int K) {
  if (K < 1) throw DomainError("partition_bins: K must be positive");
  if (primes.size() < static_cast<std::size_t>(K)) {
    throw DomainError("partition_bins: need at least K = " + std::to_string(K) + " primes, got " +
                      std::to_string(primes.size()));
  }
  std::vector<WeightedPrime> order = primes;
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
  std::vector<std::vector<std::uint64_t>> bins(K);
  std::vector<double> load(K, 0.0);
  for (const auto& wp : order) {
    // An empty bin wins first so every bin is populated.
    std::size_t target = 0;
    for (std::size_t j = 1; j < bins.size(); ++j) {
      const bool empty_j = bins[j].empty(), empty_t = bins[target].empty();
      if (empty_j != empty_t ? empty_j : load[j] < load[target]) target = j;
    }
    bins[target].push_back(wp.p);
    load[target] += wp.weight;
  }
  return bins;
}

std::vector<mpq_class> residue_products(const GapWitness& w) {
  std::vector<mpq_class> prod(w.K, mpq_class(1));
  for (const auto& e : w.primes) {
    for (int i = 0; i < w.K; ++i) prod[i] *= e.ratios.at(i);
  }
  for (auto& q : prod) q.canonicalize();
  return prod;
}

namespace {

mpq_class max_of(const std::vector<mpq_class>& v) {
  mpq_class best = v.empty() ? mpq_class(1) : v.front();
  for (const auto& q : v) best = std::max(best, q);
  return best;
}

void assemble(GapWitness& w) {
  arith::ResidueSystem sys;
  for (int j = 0; j < w.K; ++j) {
    for (auto p : w.bins[j]) sys.push_back({BigNat(offset_residue(0, j + 1, p)), p});
  }
  const auto sol = arith::crt(sys);
  w.m = sol.m;
  w.M = sol.M;
  std::sort(w.primes.begin(), w.primes.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  w.certified_epsilon = max_of(residue_products(w));
  w.certified = w.certified_epsilon <= w.target_epsilon;
}

}  // namespace

GapWitness build_witness(const DiagonalForm& form, int K, const mpq_class& target, const SelectionPolicy& policy) {
  if (K < 1) throw DomainError("build_witness: K must be positive");
  if (target <= 0) throw DomainError("build_witness: target epsilon must be positive");
  SelectionPolicy candidates_policy = policy;
  candidates_policy.max_primes = std::numeric_limits<std::size_t>::max();
  const auto candidates = select_primes(form, candidates_policy);

  GapWitness w{form};
  w.K = K;
  w.bins.assign(K, {});
  w.target_epsilon = target;
  w.exact_cap = policy.exact_cap;
  w.beta = policy.beta;
  w.T = policy.T;

  std::vector<double> L(K, 0.0);  // log of the running product for residue m+i
  const double log_target = std::log(target.get_d());
  auto potential = [](const std::vector<double>& logs) {
    double acc = 0;
    for (double x : logs) acc += std::exp(4.0 * x);
    return acc;
  };
  double current = potential(L);

  for (const auto& cand : candidates) {
    if (w.primes.size() >= policy.max_primes) break;
    const std::uint64_t p = cand.p;
    // Offsets i - j for i, j in [1, K] cover residues -(K-1) .. K-1.
    std::vector<std::uint64_t> residues;
    for (int d = -(K - 1); d <= K - 1; ++d) residues.push_back(arith::reduce(d, p));
    const auto rat = ratios_at(form, p, residues, policy.exact_cap);

    int best_bin = 0;
    double best_pot = current;
    std::vector<double> best_L;
    for (int j = 1; j <= K; ++j) {
      std::vector<double> trial = L;
      for (int i = 1; i <= K; ++i) trial[i - 1] += std::log(rat[i - j + K - 1].ratio.get_d());
      const double pot = potential(trial);
      if (pot < best_pot * (1.0 - 1e-12)) {
        best_pot = pot;
        best_bin = j;
        best_L = std::move(trial);
      }
    }
    if (best_bin == 0) continue;

    PrimeEntry entry;
    entry.p = p;
    entry.bin = best_bin;
    for (int i = 1; i <= K; ++i) {
      entry.ratios.push_back(rat[i - best_bin + K - 1].ratio);
      entry.exact.push_back(rat[i - best_bin + K - 1].exact);
    }
    w.primes.push_back(std::move(entry));
    w.bins[best_bin - 1].push_back(p);
    L = std::move(best_L);
    current = best_pot;

    if (*std::max_element(L.begin(), L.end()) <= log_target + 1e-9) {
      if (max_of(residue_products(w)) <= target) break;
    }
  }
  assemble(w);
  return w;
}

mpq_class check_witness(const DiagonalForm& form, const GapWitness& w) {
  if (!(form == w.form)) throw IntegrityError("witness is for " + w.form.to_string() + ", not " + form.to_string());
  if (w.K < 1 || w.bins.size() != static_cast<std::size_t>(w.K)) {
    throw IntegrityError("witness: bin count does not match K");
  }
  std::set<std::uint64_t> seen;
  mpz_class M = 1;
  for (int j = 0; j < w.K; ++j) {
    for (auto p : w.bins[j]) {
      if (!arith::is_prime(p)) throw IntegrityError("witness: bin entry " + std::to_string(p) + " is not prime");
      if (!seen.insert(p).second) throw IntegrityError("witness: duplicate prime " + std::to_string(p));
      M *= static_cast<unsigned long>(p);
      const std::uint64_t r = (w.m + BigNat(static_cast<std::uint64_t>(j + 1))).mod(p);
      if (r != 0) {
        throw IntegrityError("witness: congruence violation, m + " + std::to_string(j + 1) + " = " +
                             std::to_string(r) + " (mod " + std::to_string(p) + ")");
      }
    }
  }
  if (M != w.M.mpz()) throw IntegrityError("witness: M is not the product of the bin primes");
  if (!(w.m < w.M)) throw IntegrityError("witness: m is not below M");
  if (w.primes.size() != seen.size()) throw IntegrityError("witness: per-prime table does not match the bins");

  std::vector<mpq_class> prod(w.K, mpq_class(1));
  for (const auto& e : w.primes) {
    if (!seen.contains(e.p)) throw IntegrityError("witness: ratio listed for prime " + std::to_string(e.p) + " outside the bins");
    if (e.ratios.size() != static_cast<std::size_t>(w.K)) {
      throw IntegrityError("witness: prime " + std::to_string(e.p) + " does not list K ratios");
    }
    if (std::find(w.bins.at(e.bin - 1).begin(), w.bins.at(e.bin - 1).end(), e.p) == w.bins.at(e.bin - 1).end()) {
      throw IntegrityError("witness: prime " + std::to_string(e.p) + " recorded in the wrong bin");
    }
    std::vector<std::uint64_t> residues;
    for (int i = 1; i <= w.K; ++i) residues.push_back((w.m + BigNat(static_cast<std::uint64_t>(i))).mod(e.p));
    const auto fresh = ratios_at(form, e.p, residues, w.exact_cap);
    for (int i = 0; i < w.K; ++i) {
      if (fresh[i].ratio != e.ratios[i]) {
        throw IntegrityError("witness: ratio mismatch at prime " + std::to_string(e.p) + " for residue m + " +
                             std::to_string(i + 1) + ": stored " + rational_string(e.ratios[i]) + ", recomputed " +
                             rational_string(fresh[i].ratio));
      }
      prod[i] *= fresh[i].ratio;
    }
  }
  for (auto& q : prod) q.canonicalize();
  const mpq_class eps = max_of(prod);
  if (eps != w.certified_epsilon) {
    throw IntegrityError("witness: certified epsilon " + rational_string(w.certified_epsilon) + " but recomputed " +
                         rational_string(eps));
  }
  if (w.certified != (eps <= w.target_epsilon)) throw IntegrityError("witness: certified flag inconsistent with target");
  return eps;
}

double tau_bound(int s, double gamma, double K) {
  if (K < 2 || gamma < 1) throw DomainError("tau_bound: need K >= 2 and gamma >= 1");
  if (s == 3) return gamma * K * K * std::pow(std::log(K), 4);
  if (s == 4) return std::exp(std::exp(gamma * K * std::log(K)));
  throw DomainError("tau_bound: degree must be 3 or 4");
}

GapDensity gap_density_bound(const DiagonalForm& form, const GapWitness& w, std::uint64_t L) {
  if (L < 1) throw DomainError("gap_density_bound: L must be positive");
  const mpq_class eps = check_witness(form, w);
  if (eps * w.K > mpq_class(1, 2)) {
    throw DomainError("gap_density_bound: K * epsilon = " + rational_string(mpq_class(eps * w.K)) + " exceeds 1/2");
  }
  const int s = form.degree();
  mpz_class Ms1, Ls, region;
  mpz_pow_ui(Ms1.get_mpz_t(), w.M.mpz().get_mpz_t(), s - 1);
  mpz_ui_pow_ui(Ls.get_mpz_t(), L, s);
  region = Ls * Ms1 * w.M.mpz();

  // Counts r_F(m+i, M) = product_i * M^(s-1) are integers; every x in [0, LM)^s lands in at most one window.
  mpz_class bad = 0;
  for (const auto& q : residue_products(w)) {
    mpq_class c = q * mpq_class(Ms1);
    c.canonicalize();
    if (c.get_den() != 1) throw IntegrityError("gap_density_bound: non-integral residue count");
    bad += c.get_num();
  }
  if (2 * bad > Ms1) throw DomainError("gap_density_bound: sum of residue counts exceeds M^(s-1)/2");
  GapDensity out;
  out.region = BigNat(region);
  // Windows m + hM + [1,K] lying wholly below L^s M^s; all their representations have every x_j < LM.
  mpz_class windows = 0;
  if (region > w.m.mpz() + w.K) windows = (region - w.m.mpz() - w.K + w.M.mpz() - 1) / w.M.mpz();
  const mpz_class bad_windows = Ls * bad;
  out.guaranteed = BigNat(mpz_class(windows > bad_windows ? mpz_class(windows - bad_windows) : mpz_class(0)));
  out.half_bound = BigNat(mpz_class((Ls * Ms1 + 1) / 2));
  return out;
}

}  // namespace gapforms::gapcraft
