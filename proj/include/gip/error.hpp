#pragma once

#include <stdexcept>
#include <string>

namespace gip {

/// Raised for invalid instances, violated preconditions and unsupported
/// configurations. The message names the offending input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gip
