#include "gapforms/form.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "gapforms/arith.hpp"
#include "gapforms/error.hpp"

namespace gapforms {

DiagonalForm::DiagonalForm(int degree, std::vector<std::uint64_t> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree_ != 3 && degree_ != 4) {
    throw DomainError("form: degree must be 3 or 4, got " + std::to_string(degree_));
  }
  if (coeffs_.size() != static_cast<std::size_t>(degree_)) {
    throw DomainError("form: degree " + std::to_string(degree_) + " needs exactly " +
                      std::to_string(degree_) + " coefficients, got " +
                      std::to_string(coeffs_.size()));
  }
  for (auto c : coeffs_) {
    if (c == 0 || c > kMaxCoefficient) {
      throw DomainError("form: coefficients must lie in [1, 2^31 - 1], got " + std::to_string(c));
    }
  }
}

DiagonalForm DiagonalForm::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw DomainError("form spec '" + std::string(spec) + "' must look like 3:1,1,1");
  }
  auto parse_uint = [&](std::string_view tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
      throw DomainError("form spec '" + std::string(spec) + "': '" + std::string(tok) +
                        "' is not a positive integer");
    }
    return v;
  };
  const auto degree = parse_uint(spec.substr(0, colon));
  std::vector<std::uint64_t> coeffs;
  std::string_view rest = spec.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    coeffs.push_back(parse_uint(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (degree > 4) throw DomainError("form: degree must be 3 or 4");
  return DiagonalForm(static_cast<int>(degree), std::move(coeffs));
}

bool DiagonalForm::bad_prime(std::uint64_t p) const {
  return std::any_of(coeffs_.begin(), coeffs_.end(), [p](auto c) { return c % p == 0; });
}

std::uint64_t DiagonalForm::coeff_product_mod(std::uint64_t p) const {
  std::uint64_t acc = 1 % p;
  for (auto c : coeffs_) acc = arith::mul_mod(acc, c % p, p);
  return acc;
}

bool DiagonalForm::symmetric() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [&](auto c) { return c == coeffs_.front(); });
}

BigNat DiagonalForm::evaluate(std::span<const BigNat> x) const {
  if (x.size() != coeffs_.size()) throw DomainError("form: wrong number of arguments");
  BigNat acc;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    acc += BigNat(coeffs_[i]) * pow(x[i], static_cast<unsigned>(degree_));
  }
  return acc;
}

std::string DiagonalForm::to_string() const {
  std::ostringstream os;
  os << degree_ << ':';
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
  return os.str();
}

}  // namespace gapforms
