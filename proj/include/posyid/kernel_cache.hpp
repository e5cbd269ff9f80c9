#pragma once

#include <cstddef>
#include <list>
#include <unordered_map>

#include <Eigen/Core>

namespace posyid {

/**
 * Serves columns of Phi' Phi + sigma^2 I.
 *
 * Columns are computed on demand in O(mn). When the byte budget holds at
 * least one column, recently used columns are kept in an LRU cache. The
 * returned reference stays valid until the next call to column().
 */
class KernelCache {
 public:
  KernelCache(const Eigen::MatrixXd& phi, double sigma, std::size_t byte_budget);

  const Eigen::VectorXd& column(Eigen::Index i);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  void compute(Eigen::Index i, Eigen::VectorXd& out) const;

  struct Entry {
    Eigen::Index index;
    Eigen::VectorXd values;
  };

  const Eigen::MatrixXd* phi_;
  double sigma_sq_;
  std::size_t capacity_;
  std::list<Entry> entries_;  // most recent first
  std::unordered_map<Eigen::Index, std::list<Entry>::iterator> lookup_;
  Eigen::VectorXd scratch_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace posyid
