#pragma once

#include <stdexcept>

namespace msqkd {

/// The observed statistics force the users to abort: no iteration can be
/// accepted (p_a = 0) or every accepted raw-key bit is wrong (p_C = 0).
class AbortCondition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msqkd
