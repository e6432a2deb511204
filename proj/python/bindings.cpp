#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gapforms/counting.hpp"
#include "gapforms/cyclotomic.hpp"
#include "gapforms/equidist.hpp"
#include "gapforms/error.hpp"
#include "gapforms/exceptional.hpp"
#include "gapforms/gapcraft.hpp"
#include "gapforms/sieve.hpp"

namespace py = pybind11;
using namespace gapforms;

namespace {

py::object to_int(const BigNat& n) { return py::int_(py::str(n.to_string())); }

BigNat from_int(const py::int_& v) { return BigNat::from_string(py::str(v).cast<std::string>()); }

py::tuple fraction(const mpq_class& q) {
  return py::make_tuple(py::int_(py::str(q.get_num().get_str())), py::int_(py::str(q.get_den().get_str())));
}

py::dict count_dict(const counting::CountResult& r) {
  py::dict d;
  d["count"] = to_int(r.count);
  d["method"] = counting::to_string(r.method);
  d["ratio"] = fraction(r.ratio);
  d["exact"] = r.exact();
  if (r.interval) {
    d["interval"] = py::make_tuple(to_int(r.interval->lo), to_int(r.interval->hi));
  } else {
    d["interval"] = py::none();
  }
  return d;
}

equidist::ScanOptions scan_options(unsigned threads) {
  equidist::ScanOptions opts;
  opts.threads = threads;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_gapforms, m) {
  m.doc() = "Congruence counts, Jacobi sums and certified gaps for diagonal cubic and quartic forms";

  static py::exception<IntegrityError> integrity(m, "IntegrityError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const IntegrityError& e) {
      integrity(e.what());
    }
  });

  py::class_<DiagonalForm>(m, "DiagonalForm")
      .def(py::init<int, std::vector<std::uint64_t>>(), py::arg("degree"), py::arg("coeffs"))
      .def_static("parse", &DiagonalForm::parse, py::arg("spec"))
      .def_property_readonly("degree", &DiagonalForm::degree)
      .def_property_readonly("coeffs",
                             [](const DiagonalForm& f) {
                               return std::vector<std::uint64_t>(f.coeffs().begin(), f.coeffs().end());
                             })
      .def("evaluate",
           [](const DiagonalForm& f, const std::vector<py::int_>& x) {
             std::vector<BigNat> xs;
             for (const auto& v : x) xs.push_back(from_int(v));
             return to_int(f.evaluate(xs));
           })
      .def("__eq__", [](const DiagonalForm& a, const DiagonalForm& b) { return a == b; })
      .def("__str__", &DiagonalForm::to_string)
      .def("__repr__", [](const DiagonalForm& f) { return "DiagonalForm.parse('" + f.to_string() + "')"; });

  m.def(
      "count",
      [](const DiagonalForm& f, const py::int_& residue, std::uint64_t p, std::uint64_t brute_cap) {
        return count_dict(counting::count_general(f, from_int(residue).mod(p), p, counting::CountOptions{brute_cap}));
      },
      py::arg("form"), py::arg("residue"), py::arg("p"), py::arg("brute_cap") = 5000,
      "r_F(m, p) at a prime: exact when possible, otherwise the Weil interval.");
  m.def(
      "count_squarefree",
      [](const DiagonalForm& f, const py::int_& residue, const std::vector<std::uint64_t>& primes) {
        return count_dict(counting::count_squarefree(f, from_int(residue), primes));
      },
      py::arg("form"), py::arg("residue"), py::arg("primes"));
  m.def(
      "count_zero_formula", [](const DiagonalForm& f, std::uint64_t p) {
        return count_dict(counting::count_zero_formula(f, p));
      },
      py::arg("form"), py::arg("p"));

  m.def(
      "jacobi_pi",
      [](int s, std::uint64_t p) {
        const auto pi = cyclo::pi_prime(cyclo::make_context(s, p));
        return py::make_tuple(pi.a(), pi.b());
      },
      py::arg("s"), py::arg("p"), "J(chi, chi) as (a, b) meaning a + b*zeta_s for the canonical character.");
  m.def(
      "h_term",
      [](const DiagonalForm& f, std::uint64_t p) { return cyclo::h_term(f, cyclo::make_context(f.degree(), p)); },
      py::arg("form"), py::arg("p"));
  m.def(
      "k_term", [](const DiagonalForm& f, std::uint64_t q) { return cyclo::k_term(f, cyclo::make_context(4, q)); },
      py::arg("form"), py::arg("q"));

  m.def(
      "classify",
      [](const DiagonalForm& f) {
        const auto k = exceptional::is_exceptional_kummer(f);
        const auto pat = exceptional::is_exceptional_pattern(f);
        if (k.exceptional != pat.exceptional) throw IntegrityError("classifiers disagree on " + f.to_string());
        py::dict d;
        d["exceptional"] = k.exceptional;
        d["decomposition"] = pat.decomposition ? py::object(py::str(exceptional::to_string(f, *pat.decomposition)))
                                               : py::object(py::none());
        d["certificate"] = k.certificate ? py::object(py::str(exceptional::to_string(k.certificate->point)))
                                         : py::object(py::none());
        py::list image;
        for (const auto& e : k.image) image.append(py::make_tuple(exceptional::to_string(e.point), e.fiber));
        d["image"] = image;
        return d;
      },
      py::arg("form"));

  m.def(
      "scan",
      [](const DiagonalForm& f, std::uint64_t T, unsigned threads) {
        py::list out;
        for (const auto& s : equidist::scan(f, T, scan_options(threads))) {
          out.append(py::make_tuple(s.p, s.re_h, s.k));
        }
        return out;
      },
      py::arg("form"), py::arg("T"), py::arg("threads") = 1, "List of (p, Re H, K) for p <= T, p = 1 (mod s).");
  m.def(
      "density",
      [](const DiagonalForm& f, std::uint64_t T, double beta, unsigned threads) {
        const auto r = equidist::density_report(f, T, beta, std::nullopt, scan_options(threads));
        py::dict d;
        d["samples"] = r.samples;
        d["observed"] = r.observed;
        d["expected"] = r.expected;
        d["expected_all_primes"] = r.expected_all_primes;
        d["discrepancy"] = r.discrepancy;
        return d;
      },
      py::arg("form"), py::arg("T"), py::arg("beta"), py::arg("threads") = 1);

  m.def(
      "build_witness",
      [](const DiagonalForm& f, int K, const std::string& epsilon, std::uint64_t T, std::size_t max_primes) {
        gapcraft::SelectionPolicy pol;
        pol.T = T;
        pol.max_primes = max_primes;
        return gapcraft::to_json(gapcraft::build_witness(f, K, gapcraft::parse_rational(epsilon), pol));
      },
      py::arg("form"), py::arg("K"), py::arg("epsilon"), py::arg("T") = 20000, py::arg("max_primes") = 400,
      "Witness document (JSON text); epsilon is a fraction such as '1/4'.");
  m.def(
      "check_witness",
      [](const std::string& text) {
        const auto w = gapcraft::from_json(text);
        return fraction(gapcraft::check_witness(w.form, w));
      },
      py::arg("text"), "Recomputes a witness document and returns the verified epsilon as (num, den).");

  m.def(
      "sieve_values",
      [](const DiagonalForm& f, std::uint64_t N, unsigned threads) {
        sieve::SieveOptions opts;
        opts.threads = threads;
        const auto bits = sieve::sieve_values(f, N, opts);
        std::vector<std::uint64_t> out;
        for (std::uint64_t n = 0; n < N; ++n) {
          if (bits.test(n)) out.push_back(n);
        }
        return out;
      },
      py::arg("form"), py::arg("N"), py::arg("threads") = 1, "Sorted values of F below N.");
  m.def(
      "max_gap",
      [](const DiagonalForm& f, std::uint64_t N) {
        const auto g = sieve::max_gap(sieve::sieve_values(f, N));
        return py::make_tuple(g.start, g.length);
      },
      py::arg("form"), py::arg("N"));
  m.def(
      "window_values",
      [](const DiagonalForm& f, const py::int_& A, std::uint64_t K) {
        py::list out;
        for (const auto& r : sieve::window_has_value(f, from_int(A), K).representations) {
          py::list x;
          for (const auto& v : r.x) x.append(to_int(v));
          out.append(py::make_tuple(to_int(r.n), x));
        }
        return out;
      },
      py::arg("form"), py::arg("A"), py::arg("K"), "Represented n in (A, A+K] with one representation each.");
  m.def(
      "find_explicit_gap",
      [](const std::string& text, std::uint64_t h_max, std::uint64_t work_per_window) {
        const auto w = gapcraft::from_json(text);
        sieve::GapSearchOptions opts;
        opts.work_per_window = work_per_window;
        return sieve::to_json(w.form, sieve::find_explicit_gap(w.form, w, h_max, opts));
      },
      py::arg("text"), py::arg("h_max") = 200, py::arg("work_per_window") = 200'000'000,
      "Gap search report (JSON text) over a witness progression.");
}
