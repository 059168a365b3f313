// include/selfcrit/tensor.h

// Copyright 2026  The selfcrit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SELFCRIT_TENSOR_H_
#define SELFCRIT_TENSOR_H_

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace selfcrit {

// Dense row-major double matrix. Everything numeric in the loss layer is
// 64-bit: the gradient-check tolerances do not hold in float.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }

  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Dense (n0, n1, n2) tensor, row-major in the last index. Feature maps use it
// with the (frequency, time, channel) convention.
struct Tensor3 {
  int n0 = 0;
  int n1 = 0;
  int n2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int a, int b, int c, double fill = 0.0)
      : n0(a), n1(b), n2(c),
        data(static_cast<size_t>(a) * b * c, fill) {}

  double& at(int i, int j, int k) {
    assert(i >= 0 && i < n0 && j >= 0 && j < n1 && k >= 0 && k < n2);
    return data[(static_cast<size_t>(i) * n1 + j) * n2 + k];
  }
  double at(int i, int j, int k) const {
    assert(i >= 0 && i < n0 && j >= 0 && j < n1 && k >= 0 && k < n2);
    return data[(static_cast<size_t>(i) * n1 + j) * n2 + k];
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace selfcrit

#endif  // SELFCRIT_TENSOR_H_
