#include "gapforms/exceptional.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "gapforms/arith.hpp"
#include "gapforms/error.hpp"

namespace gapforms::exceptional {

namespace {

void require_quartic(const DiagonalForm& form) {
  if (form.degree() != 4) throw DomainError("exceptional forms are quartic; got " + form.to_string());
}

int valuation(std::uint64_t n, std::uint64_t p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

using Vec5 = std::array<int, 5>;

int encode(const Vec5& v) {
  int code = 0;
  for (int x : v) code = code * 4 + x;
  return code;
}

}  // namespace

DeltaGroup delta_group(const DiagonalForm& form) {
  require_quartic(form);
  std::set<std::uint64_t> support{2};
  for (auto c : form.coeffs()) {
    for (auto [q, e] : arith::factor_small(c)) support.insert(q);
  }
  DeltaGroup g;
  g.primes.assign(support.begin(), support.end());
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t value = (i < 4) ? form.coeff(i) : 4;
    for (auto q : g.primes) g.generators[i].push_back(valuation(value, q) % 4);
  }
  return g;
}

std::string to_string(const ImagePoint& pt) {
  return "(U" + std::to_string(pt.u_class) + "," + (pt.u5 > 0 ? "+1" : "-1") + ")";
}

int k_value(const ImagePoint& pt) {
  const auto& row = cyclo::class_table().at(pt.u_class - 1);
  return row.b + pt.u5 * row.c;
}

bool allowed(const ImagePoint& pt) {
  static const std::set<ImagePoint> kAllowed = {
      {2, 1}, {3, 1}, {5, 1}, {7, 1}, {8, 1}, {1, -1}, {2, -1}, {5, -1}, {6, -1}, {7, -1},
  };
  return kAllowed.contains(pt);
}

std::vector<ImageEntry> char_image(const DiagonalForm& form) {
  const auto delta = delta_group(form);
  // A character of Delta_F is the restriction of one on the free Z/4-module over the
  // support primes, so the attainable generator values are the span of the columns.
  std::map<int, Vec5> span{{0, Vec5{}}};
  for (std::size_t j = 0; j < delta.primes.size(); ++j) {
    Vec5 col;
    for (int g = 0; g < 5; ++g) col[g] = delta.generators[g][j];
    std::map<int, Vec5> next = span;
    for (const auto& [code, v] : span) {
      Vec5 w = v;
      for (int k = 1; k < 4; ++k) {
        for (int g = 0; g < 5; ++g) w[g] = (w[g] + col[g]) % 4;
        next.emplace(encode(w), w);
      }
    }
    span = std::move(next);
  }

  std::map<ImagePoint, std::uint64_t> fibers;
  for (const auto& [code, v] : span) {
    const auto cls = cyclo::classify_tuple({v[0], v[1], v[2], v[3]});
    if (v[4] % 2 != 0) throw IntegrityError("char_image: chi(4) is not +-1");
    ++fibers[ImagePoint{cls.index, v[4] == 0 ? 1 : -1}];
  }
  std::vector<ImageEntry> out;
  for (const auto& [pt, n] : fibers) out.push_back({pt, n});
  return out;
}

KummerVerdict is_exceptional_kummer(const DiagonalForm& form) {
  KummerVerdict verdict;
  verdict.image = char_image(form);
  for (const auto& e : verdict.image) {
    if (!allowed(e.point)) continue;
    if (!verdict.certificate) {
      verdict.certificate = e;
      continue;
    }
    const auto& best = *verdict.certificate;
    const auto key = [](const ImageEntry& x) {
      return std::make_tuple(-static_cast<std::int64_t>(x.fiber), k_value(x.point), x.point.u_class, -x.point.u5);
    };
    if (key(e) < key(best)) verdict.certificate = e;
  }
  verdict.exceptional = !verdict.certificate.has_value();
  return verdict;
}

std::uint64_t fourth_power_part_root(std::uint64_t n) {
  std::uint64_t root = 1;
  for (auto [q, e] : arith::factor_small(n)) {
    for (int k = 0; k < e / 4; ++k) root *= q;
  }
  return root;
}

bool is_fourth_power(std::uint64_t n) {
  const auto r = arith::int_root(n, 4);
  return r * r * r * r == n;
}

std::string to_string(const DiagonalForm& form, const PatternDecomposition& d) {
  std::ostringstream os;
  const char* role[4] = {"a", "b", "4a", "4b"};
  os << "a=" << d.a << " b=" << d.b << ":";
  for (int r = 0; r < 4; ++r) {
    os << ' ' << form.coeff(d.perm[r]) << '=' << role[r] << '*' << d.c[r] << "^4";
  }
  return os.str();
}

PatternVerdict is_exceptional_pattern(const DiagonalForm& form) {
  require_quartic(form);
  // For a fixed role assignment (A, B, 4a-slot A', 4b-slot B'), a must divide both A and A'/4.
  auto split = [](std::uint64_t A, std::uint64_t A4) -> std::optional<std::array<std::uint64_t, 3>> {
    if (A4 % 4 != 0) return std::nullopt;
    const std::uint64_t g = arith::gcd(A, A4 / 4);
    for (std::uint64_t d = 1; d * d <= g; ++d) {
      if (g % d != 0) continue;
      for (std::uint64_t a : {d, g / d}) {
        if (A % a == 0 && is_fourth_power(A / a) && is_fourth_power(A4 / 4 / a)) {
          return std::array<std::uint64_t, 3>{a, arith::int_root(A / a, 4), arith::int_root(A4 / 4 / a, 4)};
        }
      }
    }
    return std::nullopt;
  };

  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    const auto sa = split(form.coeff(perm[0]), form.coeff(perm[2]));
    if (!sa) continue;
    const auto sb = split(form.coeff(perm[1]), form.coeff(perm[3]));
    if (!sb) continue;
    PatternDecomposition d;
    d.a = (*sa)[0];
    d.b = (*sb)[0];
    d.c = {(*sa)[1], (*sb)[1], (*sa)[2], (*sb)[2]};
    d.perm = perm;
    return {true, d};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {false, std::nullopt};
}

ProbeReport empirical_exceptional_probe(const DiagonalForm& form, std::uint64_t q_max,
                                        const counting::CountOptions& opts) {
  require_quartic(form);
  if (q_max > opts.brute_cap) throw DomainError("probe: q_max exceeds the brute-force cap");
  ProbeReport rep;
  rep.q_max = q_max;
  for (auto q : arith::primes_in(2, q_max + 1)) {
    if (form.bad_prime(q)) continue;
    ++rep.primes_tested;
    const std::uint64_t r = counting::ResidueCounter(form, q).at(0);
    if (r < q * q * q) {
      rep.all_pass = false;
      rep.failure_prime = q;
      rep.failure_count = r;
      break;
    }
  }
  return rep;
}

}  // namespace gapforms::exceptional
