// errors.hpp

#ifndef DPHASE_ERRORS_HPP
#define DPHASE_ERRORS_HPP

#include <stdexcept>

namespace dphase {

/// Malformed input to any module: bad dimension, grid mismatch, invalid
/// exponents, violated preconditions. CLI exit status 1.
class contract_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its tolerance. CLI exit status 2.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace dphase

#endif
