#include "gapforms/sieve.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include "gapforms/arith.hpp"
#include "gapforms/error.hpp"
#include "json.hpp"

namespace gapforms::sieve {

std::uint64_t ValueBitset::count() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

ValueBitset& ValueBitset::operator|=(const ValueBitset& o) {
  if (o.n_ != n_) throw DomainError("bitset sizes differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

void ValueBitset::write(std::ostream& out) const {
  if (n_ > UINT32_MAX) throw DomainError("bitset export: N exceeds the 32-bit header field");
  const char header[8] = {'S',
                          'F',
                          'B',
                          1,
                          static_cast<char>(n_ & 0xff),
                          static_cast<char>((n_ >> 8) & 0xff),
                          static_cast<char>((n_ >> 16) & 0xff),
                          static_cast<char>((n_ >> 24) & 0xff)};
  out.write(header, 8);
  std::vector<char> bytes((n_ + 7) / 8, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<char>((words_[i / 8] >> (8 * (i % 8))) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ValueBitset ValueBitset::read(std::istream& in) {
  unsigned char header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8) || header[0] != 'S' || header[1] != 'F' || header[2] != 'B') {
    throw DomainError("bitset import: bad magic");
  }
  if (header[3] != 1) throw DomainError("bitset import: unsupported version");
  const std::uint64_t n = header[4] | (header[5] << 8) | (header[6] << 16) | (std::uint64_t{header[7]} << 24);
  ValueBitset bits(n);
  std::vector<unsigned char> bytes((n + 7) / 8);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
    throw DomainError("bitset import: truncated body");
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) bits.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
  return bits;
}

ValueBitset sieve_values(const DiagonalForm& form, std::uint64_t N, const SieveOptions& opts) {
  if (N == 0) throw DomainError("sieve: N must be positive");
  if (N > opts.budget_bits) {
    throw DomainError("sieve: N = " + std::to_string(N) + " exceeds the bitset budget of " +
                      std::to_string(opts.budget_bits) + " bits");
  }
  const int s = form.degree();
  const bool sym = form.symmetric();
  const std::uint64_t xmax = arith::int_root(N - 1, s);
  std::vector<std::uint64_t> pw(xmax + 1);
  for (std::uint64_t x = 0; x <= xmax; ++x) arith::checked_pow(x, s, pw[x]);
  const auto a = form.coeffs();

  auto fill = [&](ValueBitset& bits, std::uint64_t x1) {
    // acc < N throughout; every later variable is bounded by the residual room.
    auto rec = [&](auto&& self, int d, std::uint64_t acc, std::uint64_t bound) -> void {
      if (d == s) {
        bits.set(acc);
        return;
      }
      const std::uint64_t room = N - 1 - acc;
      std::uint64_t top = std::min<std::uint64_t>(xmax, arith::int_root(room / a[d], s));
      if (sym) top = std::min(top, bound);
      for (std::uint64_t x = 0; x <= top; ++x) self(self, d + 1, acc + a[d] * pw[x], x);
    };
    const std::uint64_t v = a[0] * pw[x1];
    if (v <= N - 1) rec(rec, 1, v, x1);
  };

  const std::uint64_t top0 = std::min<std::uint64_t>(xmax, arith::int_root((N - 1) / a[0], s));
  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    ValueBitset bits(N);
    for (std::uint64_t x1 = 0; x1 <= top0; ++x1) fill(bits, x1);
    return bits;
  }
  std::vector<ValueBitset> parts(threads, ValueBitset(N));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t x1 = t; x1 <= top0; x1 += threads) fill(parts[t], x1);
    });
  }
  for (auto& th : pool) th.join();
  for (unsigned t = 1; t < threads; ++t) parts[0] |= parts[t];
  return std::move(parts[0]);
}

Gap max_gap(const ValueBitset& bits) {
  if (bits.size() == 0) throw DomainError("max_gap: empty bitset");
  Gap best;
  std::uint64_t run = 0;
  for (std::uint64_t n = 0; n < bits.size(); ++n) {
    if (bits.test(n)) {
      run = 0;
      continue;
    }
    ++run;
    if (run > best.length) best = {n - run, run};  // n - run is the last set index before the run
  }
  return best;
}

namespace {

// Integer helpers so the searches below run on either uint64 or mpz_class.
std::uint64_t iroot(std::uint64_t n, int s) { return arith::int_root(n, s); }
mpz_class iroot(const mpz_class& n, int s) {
  mpz_class r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(s));
  return r;
}

template <class Int>
Int ipow(const Int& x, int s) {
  Int r = x;
  for (int i = 1; i < s; ++i) r *= x;
  return r;
}

BigNat to_big(std::uint64_t v) { return BigNat(v); }
BigNat to_big(const mpz_class& v) { return BigNat(v); }

// Saturating difference, clamped at zero.
template <class Int>
Int sat_sub(const Int& a, const Int& b) {
  return a > b ? Int(a - b) : Int(0);
}

struct WorkLimitReached {};

template <class Int>
class WindowSearch {
 public:
  WindowSearch(const DiagonalForm& form, std::uint64_t limit) : form_(form), s_(form.degree()), limit_(limit) {
    order_.resize(s_);
    std::iota(order_.begin(), order_.end(), 0);
    // Smallest coefficient last: it has the widest range and is solved by a root at the leaf.
    std::stable_sort(order_.begin(), order_.end(), [&](int i, int j) { return form.coeff(i) > form.coeff(j); });
    for (int i : order_) a_.push_back(Int(form.coeff(i)));
    sym_ = form.symmetric();
    x_.assign(s_, Int(0));
  }

  // Every n in [need, hi] with a representation, recorded once.
  void run(const Int& need, const Int& hi) { descend(0, need, hi, Int(0), Int(0)); }

  std::map<Int, std::vector<Int>> found;
  std::uint64_t work = 0;

 private:
  void tick() {
    if (limit_ != 0 && ++work > limit_) throw WorkLimitReached{};
    if (limit_ == 0) ++work;
  }

  void descend(int d, const Int& need, const Int& hi, const Int& acc, const Int& bound) {
    const Int& a = a_[d];
    Int top = iroot(Int(hi / a), s_);
    if (sym_ && d > 0 && bound < top) top = bound;
    if (d == s_ - 1) {
      // need <= a x^s: x^s >= ceil(need / a)
      const Int lo_pow = (need + a - 1) / a;
      Int lo = iroot(lo_pow, s_);
      if (ipow(lo, s_) < lo_pow) lo += 1;
      for (Int x = lo; x <= top; x += 1) {
        tick();
        x_[d] = x;
        record(acc + a * ipow(x, s_));
      }
      return;
    }
    const int remaining = s_ - d;
    for (Int x = top;; x -= 1) {
      tick();
      const Int v = a * ipow(x, s_);
      // With x_d >= x_{d+1} >= ..., the remaining variables add at most (remaining) * a * x^s.
      if (sym_ && Int(v * remaining) < need) break;
      x_[d] = x;
      descend(d + 1, sat_sub(need, v), Int(hi - v), Int(acc + v), x);
      if (x == 0) break;
    }
  }

  void record(const Int& n) {
    if (found.contains(n)) return;
    std::vector<Int> x(s_);
    for (int d = 0; d < s_; ++d) x[order_[d]] = x_[d];
    found.emplace(n, std::move(x));
  }

  const DiagonalForm& form_;
  int s_;
  std::uint64_t limit_;
  bool sym_ = false;
  std::vector<int> order_;
  std::vector<Int> a_;
  std::vector<Int> x_;
};

template <class Int>
ValueWindow run_window(const DiagonalForm& form, const BigNat& A, std::uint64_t K, const Int& need, const Int& hi,
                       const WindowOptions& opts) {
  ValueWindow win;
  win.A = A;
  win.K = K;
  WindowSearch<Int> search(form, opts.work_limit);
  try {
    search.run(need, hi);
  } catch (const WorkLimitReached&) {
    win.complete = false;
  }
  win.work = search.work;
  for (const auto& [n, x] : search.found) {
    Representation rep;
    rep.n = to_big(n);
    for (const auto& xi : x) rep.x.push_back(to_big(xi));
    if (!(form.evaluate(rep.x) == rep.n)) {
      throw IntegrityError("window search emitted a representation that does not evaluate to " + rep.n.to_string());
    }
    win.representations.push_back(std::move(rep));
  }
  return win;
}

template <class Int>
bool independent_search(const DiagonalForm& form, const Int& n, std::vector<Int>& out, std::uint64_t limit,
                        std::uint64_t& work) {
  const int s = form.degree();
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  // Largest coefficient at the leaf; outer variables ascend from zero.
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return form.coeff(i) < form.coeff(j); });
  const bool sym = form.symmetric();
  std::vector<Int> x(s, Int(0));
  auto rec = [&](auto&& self, int d, const Int& rest, const Int& floor_x) -> bool {
    const Int a(form.coeff(order[d]));
    if (d == s - 1) {
      if (rest % a != 0) return false;
      const Int q = rest / a;
      const Int r = iroot(q, s);
      if (ipow(r, s) != q || (sym && r < floor_x)) return false;
      x[order[d]] = r;
      return true;
    }
    const int remaining = s - d;
    for (Int v = sym ? floor_x : Int(0);; v += 1) {
      if (limit != 0 && ++work > limit) throw WorkLimitReached{};
      const Int pv = a * ipow(v, s);
      // Ascending order: with all later variables >= v the total is at least remaining * a v^s.
      if (sym ? Int(pv * remaining) > rest : pv > rest) return false;
      x[order[d]] = v;
      if (self(self, d + 1, Int(rest - pv), v)) return true;
    }
  };
  if (!rec(rec, 0, n, Int(0))) return false;
  out = x;
  return true;
}

constexpr std::uint64_t kFastLimit = std::uint64_t{1} << 60;

}  // namespace

ValueWindow window_has_value(const DiagonalForm& form, const BigNat& A, std::uint64_t K, const WindowOptions& opts) {
  if (K == 0) return ValueWindow{A, 0, {}, 0, true};
  const BigNat hi = A + BigNat(K);
  const BigNat need = A + BigNat(1);
  if (hi < BigNat(kFastLimit)) return run_window<std::uint64_t>(form, A, K, need.to_u64(), hi.to_u64(), opts);
  return run_window<mpz_class>(form, A, K, need.mpz(), hi.mpz(), opts);
}

namespace {

std::optional<Representation> find_representation_impl(const DiagonalForm& form, const BigNat& n,
                                                       const WindowOptions& opts) {
  std::uint64_t work = 0;
  Representation rep;
  rep.n = n;
  bool ok = false;
  if (n < BigNat(kFastLimit)) {
    std::vector<std::uint64_t> x;
    ok = independent_search<std::uint64_t>(form, n.to_u64(), x, opts.work_limit, work);
    for (auto v : x) rep.x.push_back(BigNat(v));
  } else {
    std::vector<mpz_class> x;
    ok = independent_search<mpz_class>(form, n.mpz(), x, opts.work_limit, work);
    for (const auto& v : x) rep.x.push_back(BigNat(v));
  }
  if (!ok) return std::nullopt;
  if (!(form.evaluate(rep.x) == n)) throw IntegrityError("independent search produced a wrong representation");
  return rep;
}

}  // namespace

std::optional<Representation> find_representation(const DiagonalForm& form, const BigNat& n,
                                                  const WindowOptions& opts) {
  try {
    return find_representation_impl(form, n, opts);
  } catch (const WorkLimitReached&) {
    throw DomainError("find_representation: work limit reached before deciding n = " + n.to_string());
  }
}

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::exhausted: return "exhausted";
    case SearchStatus::work_limit: return "work_limit";
  }
  return "?";
}

GapSearchReport find_explicit_gap(const DiagonalForm& form, const gapcraft::GapWitness& w, std::uint64_t h_max,
                                  const GapSearchOptions& opts) {
  GapSearchReport rep;
  rep.certified_epsilon = gapcraft::check_witness(form, w);
  rep.K = static_cast<std::uint64_t>(w.K);
  const WindowOptions wopts{opts.work_per_window};
  for (std::uint64_t h = 1; h <= h_max; ++h) {
    const BigNat a = w.m + w.M * BigNat(h - 1);
    ValueWindow win;
    try {
      win = window_has_value(form, a, rep.K, wopts);
    } catch (const WorkLimitReached&) {
      win.complete = false;
    }
    rep.work += win.work;
    if (!win.complete) {
      rep.status = SearchStatus::work_limit;
      rep.h = h;
      rep.transcript.push_back("h=" + std::to_string(h) + ": window at a=" + a.to_string() +
                               " not decided within " + std::to_string(opts.work_per_window) + " steps");
      return rep;
    }
    ++rep.windows_scanned;
    if (!win.representations.empty()) {
      ++rep.windows_with_value;
      continue;
    }
    if (rep.a) continue;

    std::vector<std::string> transcript;
    bool confirmed = true;
    for (std::uint64_t i = 1; i <= rep.K; ++i) {
      const BigNat n = a + BigNat(i);
      try {
        if (auto r = find_representation_impl(form, n, wopts)) {
          throw IntegrityError("window search and independent search disagree at n = " + n.to_string());
        }
        transcript.push_back("n=" + n.to_string() + ": no representation (independent search)");
      } catch (const WorkLimitReached&) {
        transcript.push_back("n=" + n.to_string() + ": independent search hit the work limit");
        confirmed = false;
        break;
      }
    }
    if (!confirmed) {
      rep.status = SearchStatus::work_limit;
      rep.h = h;
      rep.transcript = std::move(transcript);
      return rep;
    }
    rep.status = SearchStatus::found;
    rep.a = a;
    rep.h = h;
    rep.transcript = std::move(transcript);
    if (opts.stop_at_first) return rep;
  }
  if (!rep.a) rep.status = SearchStatus::exhausted;
  return rep;
}

std::string to_json(const DiagonalForm& form, const GapSearchReport& rep) {
  nlohmann::ordered_json j;
  j["format"] = "gapforms-gap-report";
  j["version"] = 1;
  j["form"] = form.to_string();
  j["K"] = rep.K;
  j["status"] = to_string(rep.status);
  if (rep.a) {
    j["a"] = rep.a->to_string();
    j["gap"] = {(*rep.a + BigNat(1)).to_string(), (*rep.a + BigNat(rep.K)).to_string()};
  } else {
    j["a"] = nullptr;
  }
  j["h"] = rep.h;
  j["windows_scanned"] = rep.windows_scanned;
  j["windows_with_value"] = rep.windows_with_value;
  j["hit_rate"] = rep.windows_scanned ? static_cast<double>(rep.windows_with_value) / rep.windows_scanned : 0.0;
  j["certified_epsilon"] = gapcraft::rational_string(rep.certified_epsilon);
  j["hit_bound"] = gapcraft::decimal_string(mpq_class(rep.certified_epsilon * rep.K), 6);
  j["work"] = rep.work;
  j["reverification"] = rep.transcript;
  return j.dump(2) + "\n";
}

}  // namespace gapforms::sieve
