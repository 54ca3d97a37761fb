#pragma once

#include <stdexcept>
#include <string>

namespace escalife {

/// Invalid input or violated precondition. The CLI maps this to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace escalife
