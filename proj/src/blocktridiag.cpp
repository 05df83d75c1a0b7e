#include "nlsmooth/blocktridiag.hpp"

#include <string>

#include "nlsmooth/errors.hpp"

namespace nlsmooth {

BlockTridiagonalMatrix::BlockTridiagonalMatrix(std::size_t block_size, std::size_t num_blocks)
    : n_(block_size) {
  if (block_size == 0 || num_blocks == 0) {
    throw DimensionMismatch("block-tridiagonal matrix needs n >= 1 and M >= 1");
  }
  const auto n = static_cast<Eigen::Index>(block_size);
  diag_.assign(num_blocks, Eigen::MatrixXd::Zero(n, n));
  lower_.assign(num_blocks - 1, Eigen::MatrixXd::Zero(n, n));
}

Eigen::VectorXd BlockTridiagonalMatrix::multiply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) {
    throw DimensionMismatch("multiply: vector length " + std::to_string(x.size()) +
                            " != " + std::to_string(dimension()));
  }
  const auto n = static_cast<Eigen::Index>(n_);
  const std::size_t m = num_blocks();
  Eigen::VectorXd y(x.size());
  for (std::size_t k = 0; k < m; ++k) {
    const auto row = static_cast<Eigen::Index>(k) * n;
    Eigen::VectorXd acc = diag_[k] * x.segment(row, n);
    if (k > 0) acc += lower_[k - 1] * x.segment(row - n, n);
    if (k + 1 < m) acc += lower_[k].transpose() * x.segment(row + n, n);
    y.segment(row, n) = acc;
  }
  return y;
}

Eigen::MatrixXd BlockTridiagonalMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto dim = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < num_blocks(); ++k) {
    const auto r = static_cast<Eigen::Index>(k) * n;
    d.block(r, r, n, n) = diag_[k];
    if (k + 1 < num_blocks()) {
      d.block(r + n, r, n, n) = lower_[k];
      d.block(r, r + n, n, n) = lower_[k].transpose();
    }
  }
  return d;
}

BlockTridiagonalMatrix BlockCholeskyFactor::reconstruct() const {
  BlockTridiagonalMatrix a(n_, diag_.size());
  for (std::size_t k = 0; k < diag_.size(); ++k) {
    a.diag(k) = diag_[k] * diag_[k].transpose();
    if (k > 0) a.diag(k) += coupling_[k - 1] * coupling_[k - 1].transpose();
    if (k + 1 < diag_.size()) a.lower(k) = coupling_[k] * diag_[k].transpose();
  }
  return a;
}

BlockCholeskyFactor factor(const BlockTridiagonalMatrix& a) {
  BlockCholeskyFactor f;
  f.n_ = a.block_size();
  const std::size_t m = a.num_blocks();
  f.diag_.reserve(m);
  f.coupling_.reserve(m - 1);

  Eigen::MatrixXd pivot = a.diag(0);
  for (std::size_t k = 0; k < m; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(pivot);
    ++f.block_ops_;
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite(k, "block Cholesky pivot is not positive definite");
    }
    f.diag_.push_back(llt.matrixL());
    if (k + 1 == m) break;

    // C_k = B_k L_k^{-T}, where B_k is the sub-diagonal block.
    Eigen::MatrixXd coupling =
        f.diag_[k].triangularView<Eigen::Lower>().solve(a.lower(k).transpose()).transpose();
    pivot = a.diag(k + 1) - coupling * coupling.transpose();
    f.coupling_.push_back(std::move(coupling));
    f.block_ops_ += 2;
  }
  return f;
}

Eigen::VectorXd solve(const BlockCholeskyFactor& f, const Eigen::VectorXd& rhs) {
  const auto n = static_cast<Eigen::Index>(f.block_size());
  const std::size_t m = f.num_blocks();
  if (static_cast<std::size_t>(rhs.size()) != f.block_size() * m) {
    throw DimensionMismatch("solve: rhs length " + std::to_string(rhs.size()) +
                            " != n*M = " + std::to_string(f.block_size() * m));
  }

  Eigen::VectorXd y(rhs.size());
  for (std::size_t k = 0; k < m; ++k) {
    const auto r = static_cast<Eigen::Index>(k) * n;
    Eigen::VectorXd b = rhs.segment(r, n);
    if (k > 0) b -= f.coupling(k - 1) * y.segment(r - n, n);
    y.segment(r, n) = f.diag(k).triangularView<Eigen::Lower>().solve(b);
  }

  Eigen::VectorXd x(rhs.size());
  for (std::size_t i = m; i-- > 0;) {
    const auto r = static_cast<Eigen::Index>(i) * n;
    Eigen::VectorXd b = y.segment(r, n);
    if (i + 1 < m) b -= f.coupling(i).transpose() * x.segment(r + n, n);
    x.segment(r, n) = f.diag(i).transpose().triangularView<Eigen::Upper>().solve(b);
  }
  return x;
}

}  // namespace nlsmooth
