#pragma once

#include <stdexcept>
#include <string>

namespace gapforms {

/// A request the mathematics does not allow (wrong residue class, exceptional
/// form, prime above a configured cap, ...). The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stored certificate or derived quantity disagrees with a recomputation.
/// These are never recoverable; the CLI maps them to exit code 2.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gapforms
