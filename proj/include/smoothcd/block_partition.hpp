#pragma once

#include <Eigen/Dense>
#include <vector>

namespace smoothcd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Decomposition of R^n into N contiguous index ranges.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<int> sizes);

  static BlockPartition scalar(int n);
  // Blocks of `width` coordinates, the last one possibly shorter.
  static BlockPartition uniform(int n, int width);

  int n() const { return n_; }
  int count() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_[i]; }
  int offset(int i) const { return offsets_[i]; }
  const std::vector<int>& sizes() const { return sizes_; }
  bool is_scalar() const { return count() == n_; }

  // Block index that owns coordinate j.
  int block_of(int j) const;

  VectorXd gather(const VectorXd& x, int i) const { return x.segment(offsets_[i], sizes_[i]); }
  void scatter(VectorXd& x, int i, const VectorXd& xi) const { x.segment(offsets_[i], sizes_[i]) = xi; }

  // Vector of per-block Euclidean norms.
  VectorXd block_norms(const VectorXd& x) const;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int n_ = 0;
};

}  // namespace smoothcd
