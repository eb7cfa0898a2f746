// SPDX-License-Identifier: Apache-2.0
#include "specstab/types.hpp"

#include <cmath>

namespace specstab {

void require_finite(const ComplexMatrix& a, const char* name) {
  if (!a.allFinite()) {
    throw InvalidInput(std::string(name) + ": non-finite entries (NaN/Inf)");
  }
}

void require_square(const ComplexMatrix& a, const char* name) {
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(name) + ": expected a square matrix, got " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_shape(const ComplexMatrix& a, Index rows, Index cols, const char* name) {
  if (a.rows() != rows || a.cols() != cols) {
    throw InvalidInput(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                       std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()));
  }
}

}  // namespace specstab
