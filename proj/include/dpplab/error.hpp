#ifndef DPPLAB_ERROR_HPP
#define DPPLAB_ERROR_HPP

#include <stdexcept>

namespace dpplab {

/// A computation that is well-posed but failed numerically (loss of positive
/// definiteness, quadrature insufficiency, underflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpplab

#endif  // DPPLAB_ERROR_HPP
