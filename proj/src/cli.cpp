#include "gapforms/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gapforms/arith.hpp"
#include "gapforms/counting.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/equidist.hpp"
#include "gapforms/error.hpp"
#include "gapforms/exceptional.hpp"
#include "gapforms/gapcraft.hpp"
#include "gapforms/sieve.hpp"
#include "json.hpp"

namespace gapforms::cli {

namespace {

using json = nlohmann::ordered_json;

struct Config {
  std::string form;
  std::string out = "text";
  std::string cache_dir;
  std::string file;
  std::string residue = "0";
  std::string epsilon;
  std::string beta;
  std::string u_class;
  std::uint64_t modulus = 0;
  std::uint64_t limit = 0;
  std::uint64_t budget = 0;
  std::uint64_t hmax = 200;
  int K = 1;
  unsigned threads = 1;
};

/// "1/6", "-3", "0.25" -> exact rational.
mpq_class parse_exact(const std::string& text, const char* what) {
  if (text.find('/') != std::string::npos) return gapcraft::parse_rational(text);
  const auto dot = text.find('.');
  std::string digits = text;
  std::size_t frac = 0;
  if (dot != std::string::npos) {
    frac = text.size() - dot - 1;
    digits.erase(dot, 1);
  }
  const bool ok = !digits.empty() && std::all_of(digits.begin() + (digits[0] == '-' ? 1 : 0), digits.end(),
                                                 [](unsigned char c) { return std::isdigit(c); });
  if (!ok || digits == "-") throw DomainError(std::string(what) + ": '" + text + "' is not a number");
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
  mpq_class q{mpz_class(digits), den};
  q.canonicalize();
  return q;
}

DiagonalForm require_form(const Config& cfg) {
  if (cfg.form.empty()) throw DomainError("--form is required, e.g. --form 3:1,1,1");
  return DiagonalForm::parse(cfg.form);
}

exceptional::ImagePoint parse_point(const std::string& text) {
  // "U1,-1" or "U5,+1"
  const auto comma = text.find(',');
  if (text.size() < 4 || text[0] != 'U' || comma == std::string::npos) {
    throw DomainError("--u-class expects something like U1,-1");
  }
  const int cls = std::stoi(text.substr(1, comma - 1));
  const int u5 = std::stoi(text.substr(comma + 1));
  if (cls < 1 || cls > 8 || (u5 != 1 && u5 != -1)) throw DomainError("--u-class: class U1..U8 and sign +-1");
  return {cls, u5};
}

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void cmd_count(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  if (cfg.modulus == 0) throw DomainError("--modulus is required and must be positive");
  const BigNat m = BigNat::from_string(cfg.residue);
  counting::CountOptions opts;
  if (cfg.budget) opts.brute_cap = cfg.budget;

  counting::CountResult res;
  if (arith::is_prime(cfg.modulus)) {
    res = counting::count_general(form, m.mod(cfg.modulus), cfg.modulus, opts);
  } else {
    std::vector<std::uint64_t> primes;
    for (auto [p, e] : arith::factor_small(cfg.modulus)) {
      if (e > 1) throw DomainError("--modulus must be squarefree; " + std::to_string(p) + "^2 divides it");
      primes.push_back(p);
    }
    res = counting::count_squarefree(form, m, primes, opts);
  }

  const std::string ratio = gapcraft::rational_string(res.ratio);
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["modulus"] = cfg.modulus;
    j["residue"] = m.to_string();
    j["count"] = res.count.to_string();
    j["method"] = counting::to_string(res.method);
    j["ratio"] = ratio;
    j["exact"] = res.exact();
    if (res.interval) {
      j["interval"] = {res.interval->lo.to_string(), res.interval->hi.to_string()};
    } else {
      j["interval"] = nullptr;
    }
    out << j.dump(2) << '\n';
  } else if (cfg.out == "csv") {
    out << "form,modulus,residue,count,method,ratio,exact\n";
    out << csv_quote(form.to_string()) << ',' << cfg.modulus << ',' << m << ',' << res.count << ','
        << counting::to_string(res.method) << ',' << ratio << ',' << (res.exact() ? "true" : "false") << '\n';
  } else if (res.exact()) {
    out << res.count << '\n';
  } else {
    out << '[' << res.interval->lo << ", " << res.interval->hi << "] (Weil interval; no exact path above the cap)\n";
  }
}

void cmd_jacobi(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  const int s = form.degree();
  const auto ctx = cyclo::make_context(s, cfg.modulus);
  const auto pi = cyclo::pi_prime(ctx);
  const auto h = cyclo::h_term(form, ctx);
  const auto r0 = counting::count_zero_formula(form, ctx.p);
  std::optional<int> k;
  if (s == 4) k = cyclo::k_term(form, ctx);
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["s"] = s;
    j["p"] = ctx.p;
    j["root"] = ctx.root;
    j["pi"] = {pi.a(), pi.b()};
    j["norm"] = pi.norm();
    j["re_h"] = h.real();
    j["abs_h"] = std::abs(h);
    if (k) j["k"] = *k;
    j["r0"] = r0.count.to_string();
    out << j.dump(2) << '\n';
    return;
  }
  if (cfg.out == "csv") {
    out << "form,s,p,root,pi_a,pi_b,norm,re_h,k,r0\n";
    out << csv_quote(form.to_string()) << ',' << s << ',' << ctx.p << ',' << ctx.root << ',' << pi.a() << ','
        << pi.b() << ',' << pi.norm() << ',' << std::setprecision(12) << h.real() << ',' << (k ? std::to_string(*k) : "")
        << ',' << r0.count << '\n';
    return;
  }
  const char* zeta = s == 3 ? "w" : "i";
  out << "p = " << ctx.p << ", root = " << ctx.root << '\n';
  out << "pi = J(chi,chi) = " << pi.a() << (pi.b() < 0 ? " - " : " + ") << std::llabs(pi.b()) << zeta
      << ", norm " << pi.norm() << '\n';
  out << std::setprecision(12) << "Re H = " << h.real() << ", |H| = " << std::abs(h) << '\n';
  if (k) out << "K = " << *k << '\n';
  out << "r_F(0, p) = " << r0.count << '\n';
}

void cmd_classify(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  const auto kummer = exceptional::is_exceptional_kummer(form);
  const auto pattern = exceptional::is_exceptional_pattern(form);
  if (kummer.exceptional != pattern.exceptional) {
    throw IntegrityError("classifiers disagree on " + form.to_string());
  }
  std::optional<exceptional::ProbeReport> probe;
  if (cfg.limit) probe = exceptional::empirical_exceptional_probe(form, cfg.limit);
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["exceptional"] = kummer.exceptional;
    if (pattern.decomposition) j["decomposition"] = exceptional::to_string(form, *pattern.decomposition);
    if (kummer.certificate) {
      j["certificate"] = {{"point", exceptional::to_string(kummer.certificate->point)},
                          {"k", exceptional::k_value(kummer.certificate->point)},
                          {"fiber", kummer.certificate->fiber}};
    }
    auto image = json::array();
    for (const auto& e : kummer.image) image.push_back({{"point", exceptional::to_string(e.point)}, {"fiber", e.fiber}});
    j["image"] = image;
    if (probe) {
      j["probe"] = {{"q_max", probe->q_max},
                    {"all_pass", probe->all_pass},
                    {"failure_prime", probe->failure_prime ? json(*probe->failure_prime) : json(nullptr)}};
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << "exceptional: " << (kummer.exceptional ? "true" : "false") << '\n';
  if (pattern.decomposition) out << "decomposition: " << exceptional::to_string(form, *pattern.decomposition) << '\n';
  if (kummer.certificate) {
    out << "certificate: " << exceptional::to_string(kummer.certificate->point)
        << " K=" << exceptional::k_value(kummer.certificate->point) << " fiber=" << kummer.certificate->fiber << '\n';
  }
  out << "image:";
  for (const auto& e : kummer.image) out << ' ' << exceptional::to_string(e.point) << 'x' << e.fiber;
  out << '\n';
  if (probe) {
    out << "probe q <= " << probe->q_max << ": "
        << (probe->all_pass ? std::string("r_F(0,q) >= q^3 everywhere")
                            : "fails at q = " + std::to_string(*probe->failure_prime))
        << '\n';
  }
}

void cmd_equidist(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  if (cfg.limit < 2) throw DomainError("--limit T is required (T >= 2)");
  equidist::ScanOptions opts;
  if (!cfg.cache_dir.empty()) opts.cache_dir = cfg.cache_dir;
  opts.threads = cfg.threads;
  std::optional<exceptional::ImagePoint> restriction;
  if (!cfg.u_class.empty()) restriction = parse_point(cfg.u_class);
  const double beta = cfg.beta.empty() ? 0.0 : parse_exact(cfg.beta, "--beta").get_d();
  const auto samples = equidist::scan(form, cfg.limit, opts);
  if (cfg.out == "csv") {
    out << "p,re_h,k,class,u5\n";
    for (const auto& smp : samples) {
      if (restriction && smp.class_point != restriction) continue;
      out << smp.p << ',' << std::setprecision(15) << smp.re_h << ',' << smp.k << ','
          << (smp.class_point ? smp.class_point->u_class : 0) << ',' << (smp.class_point ? smp.class_point->u5 : 0)
          << '\n';
    }
    return;
  }
  const auto rep = equidist::density_from_samples(samples, cfg.limit, beta, restriction);
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["T"] = rep.T;
    j["beta"] = rep.beta;
    if (restriction) j["restriction"] = exceptional::to_string(*restriction);
    j["samples"] = rep.samples;
    j["hits"] = rep.hits;
    j["observed"] = rep.observed;
    j["expected"] = rep.expected;
    j["expected_all_primes"] = rep.expected_all_primes;
    j["discrepancy"] = rep.discrepancy;
    out << j.dump(2) << '\n';
    return;
  }
  out << std::setprecision(6) << "samples: " << rep.samples << '\n'
      << "fraction with Re H <= " << rep.beta << ": " << rep.observed << '\n'
      << "arccos law, relative to the scanned progression: " << rep.expected << '\n'
      << "same density measured against all primes: " << rep.expected_all_primes << '\n'
      << "discrepancy (64 windows): " << rep.discrepancy << '\n';
}

gapcraft::SelectionPolicy policy_from(const Config& cfg) {
  gapcraft::SelectionPolicy pol;
  if (!cfg.beta.empty()) pol.beta = parse_exact(cfg.beta, "--beta");
  if (cfg.limit) pol.T = cfg.limit;
  if (cfg.budget) pol.max_primes = cfg.budget;
  if (!cfg.u_class.empty()) pol.u_class = parse_point(cfg.u_class);
  return pol;
}

void cmd_witness_build(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  if (cfg.K < 1) throw DomainError("--gap-length must be positive");
  const mpq_class target = cfg.epsilon.empty() ? mpq_class(1, 2 * cfg.K) : parse_exact(cfg.epsilon, "--epsilon");
  const auto w = gapcraft::build_witness(form, cfg.K, target, policy_from(cfg));
  const std::string text = gapcraft::to_json(w);
  if (!cfg.file.empty()) {
    std::ofstream f(cfg.file);
    if (!f) throw DomainError("cannot write " + cfg.file);
    f << text;
    out << "certified_epsilon ~ " << gapcraft::decimal_string(w.certified_epsilon) << ", certified " << (w.certified ? "true" : "false")
        << ", " << w.primes.size() << " primes, M has " << w.M.to_string().size() << " digits\n";
  } else {
    out << text;
  }
}

void cmd_witness_check(const Config& cfg, std::ostream& out) {
  if (cfg.file.empty()) throw DomainError("--file is required");
  const auto w = gapcraft::from_json(read_file(cfg.file));
  const DiagonalForm form = cfg.form.empty() ? w.form : DiagonalForm::parse(cfg.form);
  const auto eps = gapcraft::check_witness(form, w);
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["verified_epsilon"] = gapcraft::rational_string(eps);
    j["decimal"] = gapcraft::decimal_string(eps);
    j["certified"] = w.certified;
    out << j.dump(2) << '\n';
    return;
  }
  out << "verified epsilon " << gapcraft::rational_string(eps) << " (" << gapcraft::decimal_string(eps) << ")\n";
}

void cmd_sieve(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  if (cfg.limit == 0) throw DomainError("--limit N is required");
  sieve::SieveOptions opts;
  if (cfg.budget) opts.budget_bits = cfg.budget;
  opts.threads = cfg.threads;
  const auto bits = sieve::sieve_values(form, cfg.limit, opts);
  if (!cfg.file.empty()) {
    std::ofstream f(cfg.file, std::ios::binary);
    if (!f) throw DomainError("cannot write " + cfg.file);
    bits.write(f);
  }
  if (cfg.out == "csv") {
    out << "n\n";
    for (std::uint64_t n = 0; n < bits.size(); ++n) {
      if (bits.test(n)) out << n << '\n';
    }
  } else if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["N"] = bits.size();
    j["values"] = bits.count();
    out << j.dump(2) << '\n';
  } else {
    out << "values of " << form.to_string() << " below " << bits.size() << ": " << bits.count() << '\n';
  }
}

void cmd_maxgap(const Config& cfg, std::ostream& out) {
  const auto form = require_form(cfg);
  if (cfg.limit == 0) throw DomainError("--limit N is required");
  sieve::SieveOptions opts;
  if (cfg.budget) opts.budget_bits = cfg.budget;
  opts.threads = cfg.threads;
  const auto gap = sieve::max_gap(sieve::sieve_values(form, cfg.limit, opts));
  if (cfg.out == "json") {
    json j;
    j["form"] = form.to_string();
    j["N"] = cfg.limit;
    j["start"] = gap.start;
    j["length"] = gap.length;
    out << j.dump(2) << '\n';
  } else if (cfg.out == "csv") {
    out << "form,N,start,length\n" << csv_quote(form.to_string()) << ',' << cfg.limit << ',' << gap.start << ','
        << gap.length << '\n';
  } else if (gap.length == 0) {
    out << "no gap below " << cfg.limit << '\n';
  } else {
    out << "start=" << gap.start << " length=" << gap.length << " (" << gap.start + 1 << ".."
        << gap.start + gap.length << ")\n";
  }
}

void cmd_findgap(const Config& cfg, std::ostream& out) {
  if (cfg.file.empty()) throw DomainError("--file witness.json is required");
  const auto w = gapcraft::from_json(read_file(cfg.file));
  const DiagonalForm form = cfg.form.empty() ? w.form : DiagonalForm::parse(cfg.form);
  sieve::GapSearchOptions opts;
  if (cfg.budget) opts.work_per_window = cfg.budget;
  const auto rep = sieve::find_explicit_gap(form, w, cfg.hmax, opts);
  if (cfg.out == "text") {
    out << "status: " << sieve::to_string(rep.status) << '\n';
    if (rep.a) out << "gap: " << (*rep.a + BigNat(1)) << " .. " << (*rep.a + BigNat(rep.K)) << " (h = " << rep.h << ")\n";
    out << "windows scanned: " << rep.windows_scanned << ", with a value: " << rep.windows_with_value << '\n';
    for (const auto& line : rep.transcript) out << "  " << line << '\n';
    return;
  }
  out << sieve::to_json(form, rep);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"gapforms: congruence counts, Jacobi sums and certified gaps for diagonal forms"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"json", "csv", "text"};

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output format")->check(CLI::IsMember(formats));
  };
  auto add_form = [&](CLI::App* sub) { sub->add_option("--form", cfg.form, "Form spec, e.g. 3:1,1,1"); };

  auto* count = app.add_subcommand("count", "r_F(m, M) for a prime or squarefree modulus");
  add_form(count);
  count->add_option("--modulus", cfg.modulus, "Prime or squarefree modulus");
  count->add_option("--residue", cfg.residue, "Residue m");
  count->add_option("--budget", cfg.budget, "Brute-force cap on primes");
  add_out(count);

  auto* jac = app.add_subcommand("jacobi", "Character data, pi, H and K at a prime");
  add_form(jac);
  jac->add_option("--modulus", cfg.modulus, "Prime p = 1 (mod s)")->required();
  add_out(jac);

  auto* classify = app.add_subcommand("classify", "Exceptional verdict for a quartic form");
  add_form(classify);
  classify->add_option("--limit,-T", cfg.limit, "Also probe r_F(0,q) >= q^3 for q up to this bound");
  add_out(classify);

  auto* eq = app.add_subcommand("equidist", "Density and discrepancy of Re H over a prime scan");
  add_form(eq);
  eq->add_option("--limit,-T", cfg.limit, "Scan bound T");
  eq->add_option("--beta", cfg.beta, "Threshold beta for Re H <= beta");
  eq->add_option("--u-class", cfg.u_class, "Restrict a quartic scan to one class point, e.g. U1,-1");
  eq->add_option("--cache-dir", cfg.cache_dir, "Scan cache directory");
  eq->add_option("--threads", cfg.threads, "Worker threads");
  add_out(eq);

  auto* witness = app.add_subcommand("witness", "Build or check gap witnesses");
  witness->require_subcommand(1);
  auto* build = witness->add_subcommand("build", "Construct a certified witness");
  add_form(build);
  build->add_option("--gap-length,-K", cfg.K, "Gap length K");
  build->add_option("--epsilon", cfg.epsilon, "Target epsilon (default 1/(2K))");
  build->add_option("--beta", cfg.beta, "Selection threshold beta (default 1/2)");
  build->add_option("--limit,-T", cfg.limit, "Largest candidate prime");
  build->add_option("--budget", cfg.budget, "Maximum number of primes");
  build->add_option("--u-class", cfg.u_class, "Quartic class restriction, e.g. U1,-1");
  build->add_option("--file", cfg.file, "Write the witness here instead of standard output");
  add_out(build);
  auto* check = witness->add_subcommand("check", "Recompute a witness from scratch");
  add_form(check);
  check->add_option("--file", cfg.file, "Witness file");
  add_out(check);

  auto* sv = app.add_subcommand("sieve", "Value set of F below N");
  add_form(sv);
  sv->add_option("--limit,-T", cfg.limit, "N");
  sv->add_option("--budget", cfg.budget, "Bitset budget in bits");
  sv->add_option("--threads", cfg.threads, "Worker threads");
  sv->add_option("--file", cfg.file, "Export the bitset here");
  add_out(sv);

  auto* mg = app.add_subcommand("maxgap", "Longest run of non-values below N");
  add_form(mg);
  mg->add_option("--limit,-T", cfg.limit, "N");
  mg->add_option("--budget", cfg.budget, "Bitset budget in bits");
  mg->add_option("--threads", cfg.threads, "Worker threads");
  add_out(mg);

  auto* fg = app.add_subcommand("findgap", "Search a witness progression for an explicit gap");
  add_form(fg);
  fg->add_option("--file", cfg.file, "Witness file");
  fg->add_option("--hmax", cfg.hmax, "Number of progression windows to scan");
  fg->add_option("--budget", cfg.budget, "Work limit per window");
  add_out(fg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }

  try {
    if (count->parsed()) cmd_count(cfg, out);
    else if (jac->parsed()) cmd_jacobi(cfg, out);
    else if (classify->parsed()) cmd_classify(cfg, out);
    else if (eq->parsed()) cmd_equidist(cfg, out);
    else if (build->parsed()) cmd_witness_build(cfg, out);
    else if (check->parsed()) cmd_witness_check(cfg, out);
    else if (sv->parsed()) cmd_sieve(cfg, out);
    else if (mg->parsed()) cmd_maxgap(cfg, out);
    else if (fg->parsed()) cmd_findgap(cfg, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const IntegrityError& e) {
    err << "integrity failure: " << e.what() << '\n';
    return kIntegrity;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kIntegrity;
  }
  return kOk;
}

}  // namespace gapforms::cli
