#include "gapforms/counting.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gapforms/arith.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/error.hpp"

namespace gapforms::counting {

std::string to_string(Method m) {
  switch (m) {
    case Method::brute: return "brute";
    case Method::formula: return "formula";
    case Method::multiplicative: return "multiplicative";
    case Method::weil: return "weil";
  }
  return "?";
}

namespace {

using Sparse = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

Sparse sparsify(const std::vector<std::uint64_t>& dense) {
  Sparse out;
  for (std::size_t v = 0; v < dense.size(); ++v) {
    if (dense[v] != 0) out.emplace_back(static_cast<std::uint32_t>(v), dense[v]);
  }
  return out;
}

std::vector<std::uint64_t> convolve(const Sparse& a, const Sparse& b, std::uint64_t p) {
  std::vector<std::uint64_t> out(p, 0);
  for (auto [u, cu] : a) {
    for (auto [v, cv] : b) {
      std::uint64_t w = static_cast<std::uint64_t>(u) + v;
      if (w >= p) w -= p;
      out[w] += cu * cv;
    }
  }
  return out;
}

BigNat upow(std::uint64_t p, int e) { return pow(BigNat(p), static_cast<unsigned>(e)); }

mpq_class ratio_of(const BigNat& count, const BigNat& modulus, int s) {
  mpq_class q(count.mpz(), pow(modulus, static_cast<unsigned>(s - 1)).mpz());
  q.canonicalize();
  return q;
}

CountResult make_exact(const DiagonalForm& form, BigNat count, Method method, std::uint64_t p) {
  CountResult r;
  r.ratio = ratio_of(count, BigNat(p), form.degree());
  r.count = std::move(count);
  r.method = method;
  r.modulus = BigNat(p);
  return r;
}

void require_prime(std::uint64_t p) {
  if (!arith::is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
}

}  // namespace

std::vector<std::uint64_t> residue_histogram(std::uint64_t a, int s, std::uint64_t p) {
  std::vector<std::uint64_t> h(p, 0);
  const std::uint64_t ar = a % p;
  for (std::uint64_t x = 0; x < p; ++x) {
    std::uint64_t v = x;
    for (int k = 1; k < s; ++k) v = arith::mul_mod(v, x, p);
    ++h[arith::mul_mod(ar, v, p)];
  }
  return h;
}

ResidueCounter::ResidueCounter(const DiagonalForm& form, std::uint64_t p) : p_(p) {
  if (p < 2 || p > (1ULL << 31)) throw DomainError("ResidueCounter: prime out of range");
  const int s = form.degree();
  std::vector<Sparse> h;
  for (int i = 0; i < s; ++i) h.push_back(sparsify(residue_histogram(form.coeff(i), s, p)));
  left_ = convolve(h[0], h[1], p);
  if (s == 3) {
    right_ = h[2];
  } else {
    right_ = sparsify(convolve(h[2], h[3], p));
  }
}

std::uint64_t ResidueCounter::at(std::uint64_t m) const {
  m %= p_;
  std::uint64_t acc = 0;
  for (auto [v, c] : right_) {
    const std::uint64_t w = (m >= v) ? m - v : m + p_ - v;
    acc += c * left_[w];
  }
  return acc;
}

std::vector<std::uint64_t> ResidueCounter::all() const {
  std::vector<std::uint64_t> out(p_, 0);
  for (auto [v, c] : right_) {
    for (std::uint64_t w = 0; w < p_; ++w) {
      std::uint64_t m = w + v;
      if (m >= p_) m -= p_;
      out[m] += c * left_[w];
    }
  }
  return out;
}

CountResult count_brute(const DiagonalForm& form, std::uint64_t m, std::uint64_t p, const CountOptions& opts) {
  require_prime(p);
  if (p > opts.brute_cap) {
    throw DomainError("count_brute: p = " + std::to_string(p) + " exceeds the brute-force cap " +
                      std::to_string(opts.brute_cap) + "; use the formula path (residue 0) or raise the cap");
  }
  return make_exact(form, BigNat(ResidueCounter(form, p).at(m)), Method::brute, p);
}

CountResult count_zero_formula(const DiagonalForm& form, std::uint64_t p) {
  require_prime(p);
  const int s = form.degree();
  if (form.bad_prime(p)) {
    throw DomainError("count_zero_formula: " + std::to_string(p) + " divides a coefficient of " + form.to_string());
  }
  if (s == 3 && p == 3) throw DomainError("count_zero_formula: p = 3 divides the degree");
  if (s == 4 && p == 2) throw DomainError("count_zero_formula: p = 2 divides the degree");

  mpz_class count;
  const mpz_class P(static_cast<unsigned long>(p));
  if (s == 3) {
    if (p % 3 == 2) {
      count = P * P;
    } else {
      const auto ctx = cyclo::make_context(3, p);
      const auto h = cyclo::h_numerator(form, ctx);
      // p^2 + 2(p-1) Re(conj(chi)(A) pi)
      count = P * P + (P - 1) * mpz_class(static_cast<long>(h.two_re()));
    }
  } else {
    const mpz_class q3 = P * P * P;
    if (p % 4 == 3) {
      const int leg = arith::legendre(static_cast<std::int64_t>(form.coeff_product_mod(p)), p);
      count = q3 + leg * P * (P - 1);
    } else {
      const auto ctx = cyclo::make_context(4, p);
      const auto h = cyclo::h_numerator(form, ctx);
      const int k = cyclo::k_term(form, ctx);
      count = q3 + P * (P - 1) * k + (P - 1) * mpz_class(static_cast<long>(h.two_re()));
    }
  }
  if (count < 0) throw IntegrityError("count_zero_formula: negative count");
  return make_exact(form, BigNat(count), Method::formula, p);
}

bool within_weil(int s, std::uint64_t p, std::int64_t deviation) {
  const __int128 d = deviation < 0 ? -static_cast<__int128>(deviation) : deviation;
  if (s == 3) return d <= static_cast<__int128>(8) * p;
  // d <= 81 p^(3/2)  <=>  d^2 <= 6561 p^3
  const mpz_class lhs = mpz_class(static_cast<unsigned long>(d)) * static_cast<unsigned long>(d);
  const mpz_class P(static_cast<unsigned long>(p));
  return lhs <= 6561 * P * P * P;
}

CountResult count_general(const DiagonalForm& form, std::uint64_t m, std::uint64_t p, const CountOptions& opts) {
  require_prime(p);
  const int s = form.degree();
  m %= p;
  if (p <= opts.brute_cap) return count_brute(form, m, p, opts);

  const bool bad = form.bad_prime(p);
  if (!bad && m == 0) return count_zero_formula(form, p);
  if (!bad && s == 3 && p % 3 == 2) {
    // x -> x^3 permutes F_p, so the count is that of a linear form.
    return make_exact(form, upow(p, 2), Method::formula, p);
  }

  CountResult r;
  r.method = Method::weil;
  r.modulus = BigNat(p);
  if (bad) {
    r.interval = CountInterval{BigNat(0), upow(p, s)};
  } else {
    const mpz_class P(static_cast<unsigned long>(p));
    mpz_class main, err_lo, err_hi;
    mpz_pow_ui(main.get_mpz_t(), P.get_mpz_t(), s - 1);
    if (s == 3) {
      err_lo = err_hi = 8 * P;
    } else {
      mpz_class e2 = 6561 * P * P * P;
      mpz_sqrt(err_hi.get_mpz_t(), e2.get_mpz_t());
      err_lo = err_hi;
      if (err_lo * err_lo != e2) err_lo += 1;
    }
    mpz_class lo = main - err_lo;
    if (lo < 0) lo = 0;
    r.interval = CountInterval{BigNat(lo), BigNat(mpz_class(main + err_hi))};
  }
  r.count = r.interval->hi;
  r.ratio = ratio_of(r.count, r.modulus, s);
  return r;
}

CountResult count_squarefree(const DiagonalForm& form, const BigNat& m, std::span<const std::uint64_t> primes,
                             const CountOptions& opts) {
  std::set<std::uint64_t> seen;
  for (auto p : primes) {
    if (!seen.insert(p).second) throw DomainError("count_squarefree: duplicate prime " + std::to_string(p));
  }
  CountResult out;
  out.method = Method::multiplicative;
  out.count = BigNat(1);
  out.modulus = BigNat(1);
  out.ratio = 1;
  for (auto p : primes) {
    const auto part = count_general(form, m.mod(p), p, opts);
    if (!part.exact()) {
      throw DomainError("count_squarefree: no exact count available at p = " + std::to_string(p));
    }
    out.count *= part.count;
    out.modulus *= BigNat(p);
    out.ratio *= part.ratio;
  }
  out.ratio.canonicalize();
  return out;
}

WeilReport weil_check(const DiagonalForm& form, std::uint64_t p, const CountOptions& opts) {
  require_prime(p);
  if (form.bad_prime(p)) throw DomainError("weil_check: " + std::to_string(p) + " divides a coefficient");
  if (p > opts.brute_cap) throw DomainError("weil_check: p exceeds the brute-force cap");
  const int s = form.degree();
  WeilReport rep;
  rep.p = p;
  rep.bound = std::pow(s - 1.0, s) * std::pow(static_cast<double>(p), (s - 1) / 2.0);
  const auto counts = ResidueCounter(form, p).all();
  std::uint64_t main = 1;
  for (int k = 1; k < s; ++k) main *= p;
  for (std::uint64_t m = 1; m < p; ++m) {
    const auto dev = static_cast<std::int64_t>(counts[m]) - static_cast<std::int64_t>(main);
    if (std::llabs(dev) > std::llabs(rep.max_deviation) || m == 1) {
      rep.max_deviation = dev;
      rep.worst_residue = m;
    }
    if (!within_weil(s, p, dev)) {
      rep.pass = false;
      rep.violations.push_back(m);
    }
  }
  return rep;
}

}  // namespace gapforms::counting
