#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace nlsmooth {

/// Symmetric block-tridiagonal matrix with M diagonal blocks of size n x n.
///
/// Only the sub-diagonal blocks are stored: `lower[k]` is the block at block
/// row k+1, block column k. The super-diagonal is its transpose, so the
/// represented matrix is symmetric by construction.
class BlockTridiagonalMatrix {
 public:
  BlockTridiagonalMatrix(std::size_t block_size, std::size_t num_blocks);

  std::size_t block_size() const { return n_; }
  std::size_t num_blocks() const { return diag_.size(); }
  std::size_t dimension() const { return n_ * diag_.size(); }

  Eigen::MatrixXd& diag(std::size_t k) { return diag_[k]; }
  const Eigen::MatrixXd& diag(std::size_t k) const { return diag_[k]; }
  Eigen::MatrixXd& lower(std::size_t k) { return lower_[k]; }
  const Eigen::MatrixXd& lower(std::size_t k) const { return lower_[k]; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t n_;
  std::vector<Eigen::MatrixXd> diag_;
  std::vector<Eigen::MatrixXd> lower_;
};

/// Block Cholesky factor A = L L^T where L is block lower-bidiagonal with
/// lower-triangular diagonal blocks `diag(k)` and coupling blocks `coupling(k)`
/// at block row k+1, column k.
class BlockCholeskyFactor {
 public:
  std::size_t block_size() const { return n_; }
  std::size_t num_blocks() const { return diag_.size(); }

  const Eigen::MatrixXd& diag(std::size_t k) const { return diag_[k]; }
  const Eigen::MatrixXd& coupling(std::size_t k) const { return coupling_[k]; }

  // Number of n x n block kernels (Cholesky, triangular solve, product)
  // executed while factoring. Grows linearly in M.
  std::uint64_t block_operations() const { return block_ops_; }

  BlockTridiagonalMatrix reconstruct() const;

 private:
  friend BlockCholeskyFactor factor(const BlockTridiagonalMatrix& a);

  std::size_t n_ = 0;
  std::vector<Eigen::MatrixXd> diag_;
  std::vector<Eigen::MatrixXd> coupling_;
  std::uint64_t block_ops_ = 0;
};

// Throws NotPositiveDefinite(k) if the k-th pivot block has no Cholesky factor.
BlockCholeskyFactor factor(const BlockTridiagonalMatrix& a);

// Forward substitution with L, then backward substitution with L^T.
Eigen::VectorXd solve(const BlockCholeskyFactor& f, const Eigen::VectorXd& rhs);

}  // namespace nlsmooth
