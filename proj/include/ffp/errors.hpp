#pragma once

#include <stdexcept>
#include <string>

namespace ffp {

// Runtime numerical breakdown (non-real residues, quadrature stall, ...),
// as opposed to std::invalid_argument for violated preconditions.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ffp
