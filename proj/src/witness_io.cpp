#include <cctype>

#include "gapforms/error.hpp"
#include "gapforms/gapcraft.hpp"
#include "json.hpp"

namespace gapforms::gapcraft {

namespace {

constexpr const char* kFormat = "gapforms-witness";
constexpr int kVersion = 1;

}  // namespace

std::string rational_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto digits = [&](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t start = (allow_sign && part[0] == '-') ? 1 : 0;
    if (start == part.size()) return false;
    for (std::size_t i = start; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    }
    return true;
  };
  const std::string_view all(text);
  const auto num = all.substr(0, slash);
  const auto den = slash == std::string::npos ? std::string_view("1") : all.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false)) throw DomainError("malformed rational '" + text + "'");
  const mpz_class n{std::string(num)};
  const mpz_class d{std::string(den)};
  if (d == 0) throw DomainError("rational '" + text + "' has zero denominator");
  mpq_class q{n, d};
  q.canonicalize();
  return q;
}

std::string decimal_string(const mpq_class& q, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = q.get_num() * scale;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  // Round half up on the magnitude.
  mpz_class quotient = (2 * scaled + q.get_den()) / (2 * q.get_den());
  std::string s = quotient.get_str();
  if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return (negative ? "-" : "") + s;
}

std::string to_json(const GapWitness& w) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["form"] = w.form.to_string();
  j["K"] = w.K;
  j["bins"] = w.bins;
  j["m"] = w.m.to_string();
  j["M"] = w.M.to_string();
  auto primes = nlohmann::ordered_json::array();
  for (const auto& e : w.primes) {
    nlohmann::ordered_json pj;
    pj["p"] = e.p;
    pj["bin"] = e.bin;
    auto ratios = nlohmann::ordered_json::array();
    auto bounds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < e.ratios.size(); ++i) {
      ratios.push_back(rational_string(e.ratios[i]));
      bounds.push_back(e.exact.at(i) ? "exact" : "weil");
    }
    pj["ratios"] = ratios;
    pj["bounds"] = bounds;
    primes.push_back(pj);
  }
  j["primes"] = primes;
  j["certified_epsilon"] = rational_string(w.certified_epsilon);
  j["certified_epsilon_decimal"] = decimal_string(w.certified_epsilon);
  j["target_epsilon"] = rational_string(w.target_epsilon);
  j["certified"] = w.certified;
  j["exact_cap"] = w.exact_cap;
  j["beta"] = rational_string(w.beta);
  j["T"] = w.T;
  return j.dump(2) + "\n";
}

GapWitness from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("witness file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw DomainError("not a gapforms witness file");
    if (j.at("version").get<int>() != kVersion) throw DomainError("unsupported witness version");
    GapWitness w{DiagonalForm::parse(j.at("form").get<std::string>())};
    w.K = j.at("K").get<int>();
    w.bins = j.at("bins").get<std::vector<std::vector<std::uint64_t>>>();
    w.m = BigNat::from_string(j.at("m").get<std::string>());
    w.M = BigNat::from_string(j.at("M").get<std::string>());
    for (const auto& pj : j.at("primes")) {
      PrimeEntry e;
      e.p = pj.at("p").get<std::uint64_t>();
      e.bin = pj.at("bin").get<int>();
      for (const auto& r : pj.at("ratios")) e.ratios.push_back(parse_rational(r.get<std::string>()));
      for (const auto& b : pj.at("bounds")) e.exact.push_back(b.get<std::string>() == "exact");
      w.primes.push_back(std::move(e));
    }
    w.certified_epsilon = parse_rational(j.at("certified_epsilon").get<std::string>());
    w.target_epsilon = parse_rational(j.at("target_epsilon").get<std::string>());
    w.certified = j.at("certified").get<bool>();
    w.exact_cap = j.at("exact_cap").get<std::uint64_t>();
    w.beta = parse_rational(j.at("beta").get<std::string>());
    w.T = j.at("T").get<std::uint64_t>();
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("witness file is missing or mistypes a field: ") + e.what());
  }
}

}  // namespace gapforms::gapcraft
