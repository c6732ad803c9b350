// Copyright 2026 The subris Authors.
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

#ifndef SUBRIS_TYPES_HPP_
#define SUBRIS_TYPES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace subris {

using cd = std::complex<double>;
using Index = Eigen::Index;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Raised on contract violations: bad dimensions, malformed input, invalid
/// configuration. Numerical outcomes (infeasible, max-iter) are reported
/// through status values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(what);
}

/// Square complex matrix held as equally sized diagonal blocks.
///
/// Every matrix the reflection design produces on the element domain is
/// block diagonal with one block per amplifier, so the solvers work on the
/// blocks directly. A dense matrix is the single-block special case.
struct BlockDiagonal {
  std::vector<CMat> blocks;

  BlockDiagonal() = default;
  explicit BlockDiagonal(std::vector<CMat> b) : blocks(std::move(b)) {}

  static BlockDiagonal zeros(Index block_count, Index block_size) {
    return BlockDiagonal(std::vector<CMat>(static_cast<std::size_t>(block_count),
                                           CMat::Zero(block_size, block_size)));
  }
  static BlockDiagonal identity(Index block_count, Index block_size, double s = 1.0) {
    BlockDiagonal out = zeros(block_count, block_size);
    out.add_identity(s);
    return out;
  }
  static BlockDiagonal from_dense(const CMat& m) { return BlockDiagonal({m}); }

  Index block_count() const { return static_cast<Index>(blocks.size()); }
  Index block_size() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index size() const { return block_count() * block_size(); }

  CMat& operator[](Index l) { return blocks[static_cast<std::size_t>(l)]; }
  const CMat& operator[](Index l) const { return blocks[static_cast<std::size_t>(l)]; }

  CMat dense() const {
    const Index q = block_size();
    CMat out = CMat::Zero(size(), size());
    for (Index l = 0; l < block_count(); ++l) out.block(l * q, l * q, q, q) = (*this)[l];
    return out;
  }

  CVec apply(const CVec& x) const {
    const Index q = block_size();
    CVec out(size());
    for (Index l = 0; l < block_count(); ++l)
      out.segment(l * q, q).noalias() = (*this)[l] * x.segment(l * q, q);
    return out;
  }

  /// Aᵀ x.
  CVec apply_transpose(const CVec& x) const {
    const Index q = block_size();
    CVec out(size());
    for (Index l = 0; l < block_count(); ++l)
      out.segment(l * q, q).noalias() = (*this)[l].transpose() * x.segment(l * q, q);
    return out;
  }

  /// Re{xᴴ A x}.
  double quad(const CVec& x) const { return x.dot(apply(x)).real(); }

  BlockDiagonal transpose() const {
    BlockDiagonal out = *this;
    for (auto& b : out.blocks) b.transposeInPlace();
    return out;
  }
  BlockDiagonal adjoint() const {
    BlockDiagonal out = *this;
    for (auto& b : out.blocks) b.adjointInPlace();
    return out;
  }
  BlockDiagonal conjugate() const {
    BlockDiagonal out = *this;
    for (auto& b : out.blocks) b = b.conjugate().eval();
    return out;
  }

  BlockDiagonal& add_identity(double s) {
    for (auto& b : blocks) b.diagonal().array() += s;
    return *this;
  }

  BlockDiagonal& operator+=(const BlockDiagonal& other) {
    require(other.block_count() == block_count() && other.block_size() == block_size(),
            "BlockDiagonal: block layout mismatch");
    for (std::size_t l = 0; l < blocks.size(); ++l) blocks[l] += other.blocks[l];
    return *this;
  }
  BlockDiagonal& operator-=(const BlockDiagonal& other) {
    return *this += other.scaled(-1.0);
  }

  BlockDiagonal scaled(cd s) const {
    BlockDiagonal out = *this;
    for (auto& b : out.blocks) b *= s;
    return out;
  }

  double frobenius_sq() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& b : blocks)
      if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
    return m;
  }
};

inline BlockDiagonal operator+(BlockDiagonal a, const BlockDiagonal& b) { return a += b; }
inline BlockDiagonal operator-(BlockDiagonal a, const BlockDiagonal& b) { return a -= b; }

/// B + c·u uᵀ with B block diagonal: the shape of every expansion-point
/// matrix in the quartic surrogate (a block-diagonal sum plus a full
/// rank-one correction along θ_t).
struct BlockPlusRankOne {
  BlockDiagonal base;
  cd coef{0.0, 0.0};
  CVec u;

  Index size() const { return base.size(); }

  CMat dense() const {
    CMat out = base.dense();
    if (u.size() > 0) out += coef * u * u.transpose();
    return out;
  }

  CVec apply(const CVec& x) const {
    CVec y = base.apply(x);
    if (u.size() > 0) y += (coef * (u.transpose() * x)(0)) * u;
    return y;
  }

  CVec apply_transpose(const CVec& x) const {
    CVec y = base.apply_transpose(x);
    if (u.size() > 0) y += (coef * (u.transpose() * x)(0)) * u;
    return y;
  }
};

}  // namespace subris

#endif  // SUBRIS_TYPES_HPP_
