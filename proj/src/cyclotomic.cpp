#include "gapforms/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gapforms/arith.hpp"
#include "gapforms/error.hpp"

namespace gapforms::cyclo {

namespace {

void check_degree(int degree) {
  if (degree != 3 && degree != 4) {
    throw DomainError("cyclotomic: degree must be 3 or 4, got " + std::to_string(degree));
  }
}

std::int64_t narrow(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) throw IntegrityError(std::string("cyclotomic: overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

int mod_s(int k, int s) { return ((k % s) + s) % s; }

}  // namespace

CyclotomicInt::CyclotomicInt(int degree, std::int64_t a, std::int64_t b) : degree_(degree), a_(a), b_(b) {
  check_degree(degree);
}

CyclotomicInt CyclotomicInt::zeta_power(int degree, int k) {
  check_degree(degree);
  k = mod_s(k, degree);
  if (degree == 3) {
    static constexpr std::int64_t tab[3][2] = {{1, 0}, {0, 1}, {-1, -1}};
    return {3, tab[k][0], tab[k][1]};
  }
  static constexpr std::int64_t tab[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {4, tab[k][0], tab[k][1]};
}

CyclotomicInt CyclotomicInt::conj() const {
  // conj(zeta_3) = zeta_3^2 = -1 - zeta_3
  if (degree_ == 3) return {3, a_ - b_, -b_};
  return {4, a_, -b_};
}

std::int64_t CyclotomicInt::norm() const {
  const __int128 a = a_, b = b_;
  if (degree_ == 3) return narrow(a * a - a * b + b * b, "norm");
  return narrow(a * a + b * b, "norm");
}

std::int64_t CyclotomicInt::two_re() const {
  if (degree_ == 3) return narrow(2 * static_cast<__int128>(a_) - b_, "two_re");
  return narrow(2 * static_cast<__int128>(a_), "two_re");
}

std::complex<double> CyclotomicInt::to_complex() const {
  const auto a = static_cast<double>(a_), b = static_cast<double>(b_);
  if (degree_ == 3) return {a - b / 2.0, b * std::sqrt(3.0) / 2.0};
  return {a, b};
}

CyclotomicInt CyclotomicInt::operator+(const CyclotomicInt& o) const {
  if (o.degree_ != degree_) throw DomainError("cyclotomic: mixed degrees");
  return {degree_, narrow(static_cast<__int128>(a_) + o.a_, "add"), narrow(static_cast<__int128>(b_) + o.b_, "add")};
}

CyclotomicInt CyclotomicInt::operator-(const CyclotomicInt& o) const {
  if (o.degree_ != degree_) throw DomainError("cyclotomic: mixed degrees");
  return {degree_, narrow(static_cast<__int128>(a_) - o.a_, "sub"), narrow(static_cast<__int128>(b_) - o.b_, "sub")};
}

CyclotomicInt CyclotomicInt::operator*(const CyclotomicInt& o) const {
  if (o.degree_ != degree_) throw DomainError("cyclotomic: mixed degrees");
  const __int128 a = a_, b = b_, c = o.a_, d = o.b_;
  if (degree_ == 3) {
    // (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2, with w^2 = -1 - w
    return {3, narrow(a * c - b * d, "mul"), narrow(a * d + b * c - b * d, "mul")};
  }
  return {4, narrow(a * c - b * d, "mul"), narrow(a * d + b * c, "mul")};
}

CyclotomicInt CyclotomicInt::operator*(std::int64_t k) const {
  return {degree_, narrow(static_cast<__int128>(a_) * k, "scale"), narrow(static_cast<__int128>(b_) * k, "scale")};
}

CyclotomicInt from_power_counts(int degree, std::span<const std::int64_t> counts) {
  check_degree(degree);
  if (counts.size() != static_cast<std::size_t>(degree)) throw DomainError("cyclotomic: need one count per power");
  if (degree == 3) return {3, counts[0] - counts[2], counts[1] - counts[2]};
  return {4, counts[0] - counts[2], counts[1] - counts[3]};
}

PrimeCharContext make_context(int s, std::uint64_t p) {
  check_degree(s);
  if (!arith::is_prime(p)) throw DomainError("make_context: " + std::to_string(p) + " is not prime");
  if (p % s != 1) {
    throw DomainError("make_context: need p = 1 (mod " + std::to_string(s) + "), got p = " + std::to_string(p));
  }
  PrimeCharContext ctx;
  ctx.s = s;
  ctx.p = p;
  const std::uint64_t e = (p - 1) / s;
  // c^((p-1)/s) has exact order s for a suitable c; for s=4 it is +-i, for s=3 a primitive cube root.
  std::uint64_t x = 0;
  for (std::uint64_t c = 2; c < p; ++c) {
    x = arith::mod_pow(c, e, p);
    if (s == 4 && arith::mul_mod(x, x, p) == p - 1) break;
    if (s == 3 && x != 1) break;
  }
  const std::uint64_t other = (s == 4) ? p - x : p - 1 - x;
  ctx.root = std::min(x, other);
  ctx.unity[0] = 1;
  for (int k = 1; k < 4; ++k) ctx.unity[k] = arith::mul_mod(ctx.unity[k - 1], ctx.root, p);
  return ctx;
}

std::optional<int> chi(const PrimeCharContext& ctx, std::int64_t a) {
  const std::uint64_t r = arith::reduce(a, ctx.p);
  if (r == 0) return std::nullopt;
  const std::uint64_t v = arith::mod_pow(r, (ctx.p - 1) / ctx.s, ctx.p);
  for (int k = 0; k < ctx.s; ++k) {
    if (ctx.unity[k] == v) return k;
  }
  throw IntegrityError("chi: a^((p-1)/s) is not an s-th root of unity mod " + std::to_string(ctx.p));
}

std::vector<std::int8_t> char_table(const PrimeCharContext& ctx) {
  if (ctx.p > (1ULL << 32)) throw DomainError("char_table: prime too large for a table");
  std::vector<std::int8_t> tab(ctx.p, -1);
  // chi is multiplicative: walk the powers of a generator.
  std::uint64_t g = 2;
  const auto factors = arith::factor_small(ctx.p - 1);
  for (;; ++g) {
    bool primitive = true;
    for (auto [q, e] : factors) {
      if (arith::mod_pow(g, (ctx.p - 1) / q, ctx.p) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) break;
  }
  const int kg = *chi(ctx, static_cast<std::int64_t>(g));
  std::uint64_t x = 1;
  int k = 0;
  for (std::uint64_t j = 0; j + 1 < ctx.p; ++j) {
    tab[x] = static_cast<std::int8_t>(k);
    x = arith::mul_mod(x, g, ctx.p);
    k += kg;
    if (k >= ctx.s) k -= ctx.s;
  }
  return tab;
}

CyclotomicInt jacobi_sum(const PrimeCharContext& ctx, int e1, int e2) {
  e1 = mod_s(e1, ctx.s);
  e2 = mod_s(e2, ctx.s);
  if (e1 == 0 || e2 == 0) throw DomainError("jacobi_sum: characters must be nontrivial");
  const auto tab = char_table(ctx);
  std::vector<std::int64_t> counts(ctx.s, 0);
  for (std::uint64_t t = 2; t < ctx.p; ++t) {  // t1 = t, t2 = 1 - t, both nonzero
    const int k = e1 * tab[t] + e2 * tab[ctx.p + 1 - t];
    ++counts[k % ctx.s];
  }
  return from_power_counts(ctx.s, counts);
}

CyclotomicInt j0_sum(const PrimeCharContext& ctx, std::span<const int> exps) {
  const int s = ctx.s;
  if (exps.empty()) throw DomainError("j0_sum: need at least one character");
  std::vector<int> e;
  int total = 0;
  for (int x : exps) {
    e.push_back(mod_s(x, s));
    if (e.back() == 0) throw DomainError("j0_sum: characters must be nontrivial");
    total += e.back();
  }
  if (total % s != 0) throw DomainError("j0_sum: exponents must sum to 0 mod s");

  const std::uint64_t p = ctx.p;
  const auto base = char_table(ctx);
  const std::size_t l = e.size();
  // tabs[i][t] = e_i * chi-exponent of t, mod s; zero is never visited.
  std::vector<std::vector<std::uint8_t>> tabs(l, std::vector<std::uint8_t>(p, 0));
  for (std::size_t i = 0; i < l; ++i) {
    for (std::uint64_t t = 1; t < p; ++t) tabs[i][t] = static_cast<std::uint8_t>(e[i] * base[t] % s);
  }

  std::vector<std::int64_t> counts(s, 0);
  if (l == 1) return from_power_counts(s, counts);  // t_1 = 0 contributes chi(0) = 0

  // Enumerate t_1..t_{l-1} in F_p^x; t_l = -(sum) must be nonzero.
  std::vector<std::uint64_t> cnt(s, 0);
  auto recurse = [&](auto&& self, std::size_t depth, std::uint64_t sum, int acc) -> void {
    if (depth + 2 == l) {
      const auto& ta = tabs[depth];
      const auto& tb = tabs[depth + 1];
      for (std::uint64_t t = 1; t < p; ++t) {
        std::uint64_t u = sum + t;
        if (u >= p) u -= p;
        if (u == 0) continue;
        ++cnt[(acc + ta[t] + tb[p - u]) % s];
      }
      return;
    }
    for (std::uint64_t t = 1; t < p; ++t) {
      std::uint64_t u = sum + t;
      if (u >= p) u -= p;
      self(self, depth + 1, u, (acc + tabs[depth][t]) % s);
    }
  };
  recurse(recurse, 0, 0, 0);
  for (int k = 0; k < s; ++k) counts[k] = static_cast<std::int64_t>(cnt[k]);
  return from_power_counts(s, counts);
}

namespace {

// Twice the bilinear form attached to the norm, in coordinates (x, y) for x + y*zeta.
__int128 two_b(int s, std::int64_t u1, std::int64_t u2, std::int64_t v1, std::int64_t v2) {
  const __int128 a = u1, b = u2, c = v1, d = v2;
  if (s == 3) return 2 * a * c - a * d - b * c + 2 * b * d;
  return 2 * (a * c + b * d);
}

bool primary_cubic(const CyclotomicInt& z) {
  return arith::reduce(z.a(), 3) == 2 && arith::reduce(z.b(), 3) == 0;
}

bool primary_gaussian(const CyclotomicInt& z) {
  const auto a = arith::reduce(z.a(), 4), b = arith::reduce(z.b(), 4);
  return (a == 1 && b == 0) || (a == 3 && b == 2);
}

}  // namespace

CyclotomicInt pi_prime(const PrimeCharContext& ctx) {
  const int s = ctx.s;
  // The lattice {x + y*root = 0 mod p} is the prime above p cut out by zeta -> root.
  std::int64_t v[2][2] = {{static_cast<std::int64_t>(ctx.p), 0}, {-static_cast<std::int64_t>(ctx.root), 1}};
  auto q = [&](int i) { return two_b(s, v[i][0], v[i][1], v[i][0], v[i][1]); };
  while (true) {
    if (q(0) > q(1)) std::swap(v[0], v[1]);
    const __int128 num = two_b(s, v[0][0], v[0][1], v[1][0], v[1][1]);
    const __int128 den = q(0);
    // round(num / den)
    __int128 mu = (2 * num + den) / (2 * den);
    if (2 * num + den < 0 && (2 * num + den) % (2 * den) != 0) --mu;
    if (mu == 0) break;
    v[1][0] = narrow(v[1][0] - mu * v[0][0], "pi_prime");
    v[1][1] = narrow(v[1][1] - mu * v[0][1], "pi_prime");
  }
  const CyclotomicInt gen(s, v[0][0], v[0][1]);
  if (gen.norm() != static_cast<std::int64_t>(ctx.p)) {
    throw IntegrityError("pi_prime: reduced generator has norm " + std::to_string(gen.norm()) + " != p");
  }
  for (int k = 0; k < s; ++k) {
    for (int sign : {1, -1}) {
      const CyclotomicInt cand = gen * CyclotomicInt::zeta_power(s, k) * sign;
      if (s == 3 && primary_cubic(cand)) return cand;
      if (s == 4 && primary_gaussian(cand)) {
        // J(chi, chi) = -chi(-1) * primary generator
        const bool minus_one_is_square = ((ctx.p - 1) / 4) % 2 == 0;
        return minus_one_is_square ? cand * -1 : cand;
      }
    }
  }
  throw IntegrityError("pi_prime: no primary associate found");
}

std::complex<double> gauss_sum(const PrimeCharContext& ctx, int e) {
  e = mod_s(e, ctx.s);
  if (e == 0) throw DomainError("gauss_sum: character must be nontrivial");
  const auto tab = char_table(ctx);
  std::complex<long double> acc = 0;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double quarter = two_pi / ctx.s;
  for (std::uint64_t t = 1; t < ctx.p; ++t) {
    const long double angle = quarter * ((e * tab[t]) % ctx.s) + two_pi * static_cast<long double>(t) / ctx.p;
    acc += std::polar(1.0L, angle);
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

namespace {

void check_form_prime(const DiagonalForm& form, const PrimeCharContext& ctx) {
  if (form.degree() != ctx.s) throw DomainError("form degree does not match the character order");
  if (form.bad_prime(ctx.p)) {
    throw DomainError(std::to_string(ctx.p) + " divides a coefficient of " + form.to_string());
  }
}

}  // namespace

CyclotomicInt h_numerator(const DiagonalForm& form, const PrimeCharContext& ctx) {
  check_form_prime(form, ctx);
  const int k = *chi(ctx, static_cast<std::int64_t>(form.coeff_product_mod(ctx.p)));
  const CyclotomicInt pi = pi_prime(ctx);
  const CyclotomicInt twist = CyclotomicInt::zeta_power(ctx.s, -k);
  return ctx.s == 3 ? twist * pi : twist * pi * pi;
}

std::complex<double> h_term(const DiagonalForm& form, const PrimeCharContext& ctx) {
  const auto z = h_numerator(form, ctx).to_complex();
  const double scale = ctx.s == 3 ? std::sqrt(static_cast<double>(ctx.p)) : static_cast<double>(ctx.p);
  return z / scale;
}

const std::array<ClassRow, 8>& class_table() {
  // Exponents of i: 1 -> 0, i -> 1, -1 -> 2, -i -> 3.
  static const std::array<ClassRow, 8> rows = {{
      {1, {0, 0, 0, 0}, 7, 12},
      {2, {0, 0, 0, 2}, -5, 0},
      {3, {0, 0, 0, 1}, -1, -6},
      {4, {0, 0, 2, 2}, 7, -4},
      {5, {0, 0, 2, 1}, -1, 2},
      {6, {0, 0, 1, 1}, 3, 4},
      {7, {0, 0, 1, 3}, -1, 0},
      {8, {0, 2, 1, 3}, 3, -4},
  }};
  return rows;
}

std::array<int, 4> canonical_tuple(std::array<int, 4> exps) {
  std::array<int, 4> best{9, 9, 9, 9};
  for (int c : {1, 3}) {
    for (int shift = 0; shift < 4; ++shift) {
      std::array<int, 4> t;
      for (int i = 0; i < 4; ++i) t[i] = mod_s(c * exps[i] + shift, 4);
      std::sort(t.begin(), t.end());
      best = std::min(best, t);
    }
  }
  return best;
}

TupleClass classify_tuple(std::array<int, 4> exps) {
  const auto canon = canonical_tuple(exps);
  for (const auto& row : class_table()) {
    if (canonical_tuple(row.representative) == canon) return {row.index, row.b, row.c};
  }
  throw IntegrityError("classify_tuple: tuple outside every class");
}

std::pair<int, int> symmetric_bc(std::array<int, 4> e) {
  for (auto& x : e) x = mod_s(x, 4);
  // Accumulate sums of powers of i by exponent; each sum must be a real integer.
  std::array<int, 4> bsum{}, csum{};
  std::array<int, 4> idx{0, 1, 2, 3};
  do {
    const auto& [s1, s2, s3, s4] = idx;
    ++bsum[mod_s(e[s1] + e[s2] + 3 * e[s3] + 3 * e[s4], 4)];
    ++csum[mod_s(2 * e[s1] + 2 * e[s2] + e[s3] + 3 * e[s4], 4)];
  } while (std::next_permutation(idx.begin(), idx.end()));
  const int b_re = bsum[0] - bsum[2], b_im = bsum[1] - bsum[3];
  const int c_re = csum[0] - csum[2], c_im = csum[1] - csum[3];
  if (b_im != 0 || c_im != 0 || b_re % 4 != 0 || c_re % 2 != 0) {
    throw IntegrityError("symmetric_bc: symmetric sums are not integral");
  }
  const int lead = (mod_s(2 * (e[0] + e[1] + e[2] + e[3]), 4) == 0) ? 1 : -1;
  return {lead + b_re / 4, c_re / 2};
}

Mu4Tuple character_point(const DiagonalForm& form, const PrimeCharContext& ctx) {
  if (ctx.s != 4) throw DomainError("character_point: needs a quartic context");
  check_form_prime(form, ctx);
  Mu4Tuple t;
  for (int i = 0; i < 4; ++i) t.e[i] = *chi(ctx, static_cast<std::int64_t>(form.coeff(i) % ctx.p));
  t.e5 = *chi(ctx, -1);
  return t;
}

int k_term(const DiagonalForm& form, const PrimeCharContext& ctx) {
  const auto pt = character_point(form, ctx);
  const auto cls = classify_tuple(pt.e);
  return pt.e5 == 0 ? cls.b + cls.c : cls.b - cls.c;
}

}  // namespace gapforms::cyclo
