#include "smoothcd/block_partition.hpp"

#include <algorithm>
#include <string>

#include "smoothcd/errors.hpp"

namespace smoothcd {

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ArgumentError("block partition needs at least one block");
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 1) throw ArgumentError("block sizes must be positive, got " + std::to_string(s));
    offsets_.push_back(n_);
    n_ += s;
  }
}

BlockPartition BlockPartition::scalar(int n) {
  if (n < 1) throw ArgumentError("dimension must be positive");
  return BlockPartition(std::vector<int>(n, 1));
}

BlockPartition BlockPartition::uniform(int n, int width) {
  if (n < 1 || width < 1) throw ArgumentError("dimension and block width must be positive");
  std::vector<int> sizes;
  for (int start = 0; start < n; start += width) sizes.push_back(std::min(width, n - start));
  return BlockPartition(std::move(sizes));
}

int BlockPartition::block_of(int j) const {
  if (j < 0 || j >= n_) throw ArgumentError("coordinate out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), j);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

VectorXd BlockPartition::block_norms(const VectorXd& x) const {
  if (x.size() != n_) throw ArgumentError("dimension mismatch in block_norms");
  VectorXd out(count());
  for (int i = 0; i < count(); ++i) out[i] = x.segment(offsets_[i], sizes_[i]).norm();
  return out;
}

}  // namespace smoothcd
