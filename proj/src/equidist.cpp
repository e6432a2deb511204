#include "gapforms/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "gapforms/arith.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/error.hpp"

namespace gapforms::equidist {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCacheMagic = "# gapforms scan cache v1";

double re_h_from(int s, std::uint64_t p, std::int64_t two_re) {
  const double scale = (s == 3) ? std::sqrt(static_cast<double>(p)) : static_cast<double>(p);
  return static_cast<double>(two_re) / (2.0 * scale);
}

std::vector<PrimeSample> scan_range(const DiagonalForm& form, std::uint64_t lo, std::uint64_t hi) {
  std::vector<PrimeSample> out;
  for (auto p : arith::primes_in(lo, hi)) {
    if (p % form.degree() != 1 || form.bad_prime(p)) continue;
    out.push_back(sample_at(form, p));
  }
  return out;
}

}  // namespace

fs::path ScanOptions::default_cache_dir() {
  if (const char* env = std::getenv("GAPFORMS_CACHE_DIR"); env && *env) return env;
  return {};
}

PrimeSample sample_at(const DiagonalForm& form, std::uint64_t p) {
  const auto ctx = cyclo::make_context(form.degree(), p);
  PrimeSample smp;
  smp.p = p;
  smp.two_re = cyclo::h_numerator(form, ctx).two_re();
  smp.re_h = re_h_from(form.degree(), p, smp.two_re);
  if (form.degree() == 4) {
    const auto pt = cyclo::character_point(form, ctx);
    const auto cls = cyclo::classify_tuple(pt.e);
    smp.class_point = exceptional::ImagePoint{cls.index, pt.e5 == 0 ? 1 : -1};
    smp.k = exceptional::k_value(*smp.class_point);
  }
  return smp;
}

std::uint64_t form_hash(const DiagonalForm& form) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : form.to_string()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

fs::path cache_path(const fs::path& dir, const DiagonalForm& form, std::uint64_t lo, std::uint64_t hi) {
  std::ostringstream name;
  name << "scan-" << std::hex << form_hash(form) << std::dec << '-' << lo << '-' << hi << ".csv";
  return dir / name.str();
}

void write_cache(const fs::path& path, const DiagonalForm& form, std::uint64_t lo, std::uint64_t hi,
                 const std::vector<PrimeSample>& samples) {
  fs::create_directories(path.parent_path());
  std::ostringstream tmpname;
  tmpname << path.filename().string() << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp = path.parent_path() / tmpname.str();
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << kCacheMagic << '\n';
    out << "# form=" << form.to_string() << " lo=" << lo << " hi=" << hi << '\n';
    out << "p,two_re,k,class,u5\n";
    for (const auto& smp : samples) {
      out << smp.p << ',' << smp.two_re << ',' << smp.k << ',' << (smp.class_point ? smp.class_point->u_class : 0)
          << ',' << (smp.class_point ? smp.class_point->u5 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("cache: failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<std::vector<PrimeSample>> read_cache(const fs::path& path, const DiagonalForm& form, std::uint64_t lo,
                                                   std::uint64_t hi) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  std::ostringstream expected_meta;
  expected_meta << "# form=" << form.to_string() << " lo=" << lo << " hi=" << hi;
  if (!std::getline(in, line) || line != kCacheMagic) return std::nullopt;
  if (!std::getline(in, line) || line != expected_meta.str()) return std::nullopt;
  if (!std::getline(in, line) || line != "p,two_re,k,class,u5") return std::nullopt;
  std::vector<PrimeSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    PrimeSample smp;
    int cls = 0, u5 = 0;
    char c1, c2, c3, c4;
    if (!(row >> smp.p >> c1 >> smp.two_re >> c2 >> smp.k >> c3 >> cls >> c4 >> u5)) return std::nullopt;
    if (smp.p < lo || smp.p >= hi) return std::nullopt;
    smp.re_h = re_h_from(form.degree(), smp.p, smp.two_re);
    if (cls != 0) smp.class_point = exceptional::ImagePoint{cls, u5};
    out.push_back(smp);
  }
  return out;
}

std::vector<PrimeSample> scan(const DiagonalForm& form, std::uint64_t T, const ScanOptions& opts) {
  if (T < 2) throw DomainError("scan: T must be at least 2");
  const std::uint64_t chunk = std::max<std::uint64_t>(opts.chunk, 1024);
  const std::uint64_t end = T + 1;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  for (std::uint64_t lo = 0; lo < end; lo += chunk) ranges.emplace_back(lo, std::min(end, lo + chunk));

  std::vector<std::vector<PrimeSample>> parts(ranges.size());
  auto work = [&](std::size_t i) {
    const auto [lo, hi] = ranges[i];
    if (!opts.cache_dir.empty()) {
      const auto path = cache_path(opts.cache_dir, form, lo, hi);
      if (auto cached = read_cache(path, form, lo, hi)) {
        parts[i] = std::move(*cached);
        return;
      }
      parts[i] = scan_range(form, lo, hi);
      write_cache(path, form, lo, hi, parts[i]);
      return;
    }
    parts[i] = scan_range(form, lo, hi);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(ranges.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < ranges.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex mu;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < ranges.size(); i += threads) work(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<PrimeSample> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

double discrepancy(const std::vector<PrimeSample>& samples) {
  if (samples.empty()) throw DomainError("discrepancy: no samples in range");
  constexpr int kWindows = 64;
  // below[j] = #{theta < j*pi/64}; the last grid point takes every sample.
  std::vector<std::uint64_t> below(kWindows + 1, 0);
  for (const auto& smp : samples) {
    const double theta = std::acos(std::clamp(smp.re_h, -1.0, 1.0));
    int bucket = static_cast<int>(theta / std::numbers::pi * kWindows);
    bucket = std::clamp(bucket, 0, kWindows - 1);
    for (int j = bucket + 1; j <= kWindows; ++j) ++below[j];
  }
  const double n = static_cast<double>(samples.size());
  double worst = 0;
  for (int i = 0; i <= kWindows; ++i) {
    for (int j = i + 1; j <= kWindows; ++j) {
      const double obs = static_cast<double>(below[j] - below[i]) / n;
      worst = std::max(worst, std::abs(obs - static_cast<double>(j - i) / kWindows));
    }
  }
  return worst;
}

double discrepancy(const DiagonalForm& form, std::uint64_t T, const ScanOptions& opts) {
  if (T < 100) throw DomainError("discrepancy: T must be at least 100");
  return discrepancy(scan(form, T, opts));
}

DensityReport density_from_samples(const std::vector<PrimeSample>& samples, std::uint64_t T, double beta,
                                   std::optional<exceptional::ImagePoint> restriction) {
  if (!(beta > -1.0 && beta <= 1.0)) throw DomainError("density_report: beta must lie in (-1, 1]");
  DensityReport rep;
  rep.T = T;
  rep.beta = beta;
  rep.restriction = restriction;
  std::vector<PrimeSample> kept;
  for (const auto& smp : samples) {
    if (restriction && smp.class_point != restriction) continue;
    kept.push_back(smp);
    ++rep.samples;
    if (smp.re_h <= beta) ++rep.hits;
  }
  rep.observed = rep.samples ? static_cast<double>(rep.hits) / rep.samples : 0.0;
  rep.expected = std::acos(-beta) / std::numbers::pi;
  // p = 1 (mod s) carries half of all primes for s = 3 and s = 4.
  rep.expected_all_primes = rep.expected / 2.0;
  rep.discrepancy = kept.empty() ? 0.0 : discrepancy(kept);
  return rep;
}

DensityReport density_report(const DiagonalForm& form, std::uint64_t T, double beta,
                             std::optional<exceptional::ImagePoint> restriction, const ScanOptions& opts) {
  if (restriction && form.degree() != 4) throw DomainError("density_report: class restriction needs a quartic form");
  return density_from_samples(scan(form, T, opts), T, beta, restriction);
}

}  // namespace gapforms::equidist
