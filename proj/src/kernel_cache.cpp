#include "posyid/kernel_cache.hpp"

namespace posyid {

KernelCache::KernelCache(const Eigen::MatrixXd& phi, double sigma, std::size_t byte_budget)
    : phi_(&phi), sigma_sq_(sigma * sigma) {
  const std::size_t column_bytes =
      static_cast<std::size_t>(phi.cols()) * sizeof(double) + sizeof(Entry);
  capacity_ = column_bytes == 0 ? 0 : byte_budget / column_bytes;
}

void KernelCache::compute(Eigen::Index i, Eigen::VectorXd& out) const {
  out.noalias() = phi_->transpose() * phi_->col(i);
  out[i] += sigma_sq_;
}

const Eigen::VectorXd& KernelCache::column(Eigen::Index i) {
  if (capacity_ == 0) {
    ++misses_;
    compute(i, scratch_);
    return scratch_;
  }
  if (auto it = lookup_.find(i); it != lookup_.end()) {
    ++hits_;
    entries_.splice(entries_.begin(), entries_, it->second);
    return entries_.front().values;
  }
  ++misses_;
  if (entries_.size() >= capacity_) {
    // Recycle the least recently used buffer.
    auto last = std::prev(entries_.end());
    lookup_.erase(last->index);
    last->index = i;
    entries_.splice(entries_.begin(), entries_, last);
  } else {
    entries_.push_front(Entry{i, Eigen::VectorXd()});
  }
  compute(i, entries_.front().values);
  lookup_[i] = entries_.begin();
  return entries_.front().values;
}

}  // namespace posyid
