#pragma once

#include "hdlab/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace hdlab {

/// General dense exponential (scaling-and-squaring Pade).
inline cmat exp_general(const cmat& x) { return x.exp(); }

}  // namespace hdlab
