// Copyright 2026 The ovlm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OVLM_MAT_HPP_
#define OVLM_MAT_HPP_

#include <cstddef>
#include <vector>

namespace ovlm {

// Row-major dense matrices. Parameters are float32 (the checkpoint format and
// the bit-exact save/load roundtrip demand it); all arithmetic accumulates in
// double, so MatD carries activations and gradients.

struct MatF {
  int rows = 0;
  int cols = 0;
  std::vector<float> v;

  MatF() = default;
  MatF(int r, int c) { resize(r, c); }
  void resize(int r, int c) {
    rows = r;
    cols = c;
    v.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0f);
  }
  float* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const float* row(int r) const {
    return v.data() + static_cast<std::size_t>(r) * cols;
  }
  std::size_t size() const { return v.size(); }
};

struct MatD {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  MatD() = default;
  MatD(int r, int c) { resize(r, c); }
  void resize(int r, int c) {
    rows = r;
    cols = c;
    v.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0);
  }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
  double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return v.data() + static_cast<std::size_t>(r) * cols;
  }
  std::size_t size() const { return v.size(); }
};

// y (B x H) += x (B x E) * w (E x H)
void addmm(MatD& y, const MatD& x, const MatF& w);
// dw (E x H) += x^T (B x E) * dy (B x H)
void add_at_b(MatD& dw, const MatD& x, const MatD& dy);
// dx (B x E) += dy (B x H) * w^T (E x H)
void add_bt(MatD& dx, const MatD& dy, const MatF& w);

}  // namespace ovlm

#endif  // OVLM_MAT_HPP_
