#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsbm/errors.hpp"

namespace gsbm {

using Index = Eigen::Index;

// Dense symmetric tensor of order m over R^d, stored as d^m entries with the
// first index most significant (row-major). Order 0 holds a single scalar.
//
// Instances are immutable. The checked constructor rejects entry arrays that
// are not permutation invariant; use symmetrize() to build one from raw data.
template <typename Scalar>
class SymTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  struct AssumeSymmetric {};

  SymTensor() : order_(0), dim_(1), entries_(Vector::Zero(1)) {}

  SymTensor(int order, Index dim) : order_(order), dim_(dim), entries_(Vector::Zero(count(order, dim))) {
    if (order < 0 || dim < 1) throw ConfigError("SymTensor: order must be >= 0 and dim >= 1");
  }

  SymTensor(int order, Index dim, Vector entries, Scalar tol = Scalar(1e-12))
      : SymTensor(order, dim, std::move(entries), AssumeSymmetric{}) {
    const Scalar scale = std::max<Scalar>(Scalar(1), max_abs());
    if (defect_of(*this) > tol * scale) throw ConfigError("SymTensor: entries are not symmetric");
  }

  // Skips the symmetry check. For results of operations that preserve symmetry.
  SymTensor(int order, Index dim, Vector entries, AssumeSymmetric)
      : order_(order), dim_(dim), entries_(std::move(entries)) {
    if (order < 0 || dim < 1) throw ConfigError("SymTensor: order must be >= 0 and dim >= 1");
    if (entries_.size() != count(order, dim)) throw ConfigError("SymTensor: entry count must be dim^order");
  }

  static SymTensor scalar(Scalar value) {
    Vector v(1);
    v(0) = value;
    return SymTensor(0, 1, std::move(v), AssumeSymmetric{});
  }

  // c * w^{(x) order}
  static SymTensor rank_one(const Vector& w, int order, Scalar c = Scalar(1)) {
    Vector out = Vector::Constant(1, c);
    for (int i = 0; i < order; ++i) {
      Vector next(out.size() * w.size());
      for (Index a = 0; a < out.size(); ++a) next.segment(a * w.size(), w.size()) = out(a) * w;
      out = std::move(next);
    }
    return SymTensor(order, w.size(), std::move(out), AssumeSymmetric{});
  }

  static Index count(int order, Index dim) {
    Index n = 1;
    for (int i = 0; i < order; ++i) n *= dim;
    return n;
  }

  int order() const { return order_; }
  Index dim() const { return dim_; }
  Index size() const { return entries_.size(); }
  const Vector& entries() const { return entries_; }

  Index flat_index(std::span<const Index> idx) const {
    Index flat = 0;
    for (Index i : idx) flat = flat * dim_ + i;
    return flat;
  }

  void unravel(Index flat, std::span<Index> out) const {
    for (int axis = order_ - 1; axis >= 0; --axis) {
      out[axis] = flat % dim_;
      flat /= dim_;
    }
  }

  Scalar operator()(std::span<const Index> idx) const { return entries_(flat_index(idx)); }
  Scalar operator()(std::initializer_list<Index> idx) const {
    return (*this)(std::span<const Index>(idx.begin(), idx.size()));
  }

  Scalar value() const { return entries_(0); }
  Scalar max_abs() const { return entries_.size() ? entries_.cwiseAbs().maxCoeff() : Scalar(0); }

  // Mode-0 unfolding, d x d^{m-1}, as a view over the entries.
  Eigen::Map<const RowMajorMatrix> unfolding() const {
    return {entries_.data(), dim_, order_ == 0 ? 1 : entries_.size() / dim_};
  }

  friend SymTensor operator*(Scalar c, const SymTensor& t) {
    return SymTensor(t.order_, t.dim_, (c * t.entries_).eval(), AssumeSymmetric{});
  }

 private:
  template <typename S>
  friend S symmetry_defect(const SymTensor<S>& t);

  // Largest deviation of an entry from the mean over its permutation orbit.
  static Scalar defect_of(const SymTensor& t) {
    if (t.order_ <= 1) return Scalar(0);
    const auto means = orbit_means(t.order_, t.dim_, t.entries_);
    return (t.entries_ - means).cwiseAbs().maxCoeff();
  }

 public:
  // Entry-wise mean over all index permutations (the orbit of each multi-index).
  static Vector orbit_means(int order, Index dim, const Vector& raw) {
    const Index n = raw.size();
    std::vector<Index> canonical(n);
    std::vector<Index> idx(order);
    std::unordered_map<Index, std::pair<Scalar, Index>> sums;
    SymTensor shape(order, dim, Vector::Zero(n), AssumeSymmetric{});
    for (Index flat = 0; flat < n; ++flat) {
      shape.unravel(flat, idx);
      std::sort(idx.begin(), idx.end());
      canonical[flat] = shape.flat_index(idx);
      auto& s = sums[canonical[flat]];
      s.first += raw(flat);
      s.second += 1;
    }
    Vector out(n);
    for (Index flat = 0; flat < n; ++flat) {
      const auto& s = sums.at(canonical[flat]);
      out(flat) = s.first / static_cast<Scalar>(s.second);
    }
    return out;
  }

 private:
  int order_;
  Index dim_;
  Vector entries_;
};

template <typename Scalar>
Scalar symmetry_defect(const SymTensor<Scalar>& t) {
  return SymTensor<Scalar>::defect_of(t);
}

// Symmetrizes a raw d^m entry array. Returns the tensor and the pre-symmetrization defect.
template <typename Scalar>
std::pair<SymTensor<Scalar>, Scalar> symmetrize(int order, Index dim,
                                                const typename SymTensor<Scalar>::Vector& raw) {
  using T = SymTensor<Scalar>;
  if (raw.size() != T::count(order, dim)) throw ConfigError("symmetrize: entry count must be dim^order");
  if (order <= 1) return {T(order, dim, raw, typename T::AssumeSymmetric{}), Scalar(0)};
  auto means = T::orbit_means(order, dim, raw);
  const Scalar defect = (raw - means).cwiseAbs().maxCoeff();
  return {T(order, dim, std::move(means), typename T::AssumeSymmetric{}), defect};
}

// T[v, ., ..., .]: contracts the leading axis.
template <typename Scalar>
SymTensor<Scalar> contract_leading(const SymTensor<Scalar>& t, const typename SymTensor<Scalar>::Vector& v) {
  using T = SymTensor<Scalar>;
  if (t.order() < 1) throw ConfigError("contract: tensor has order 0");
  if (v.size() != t.dim()) throw ConfigError("contract: vector length does not match tensor dimension");
  typename T::Vector out = (v.transpose() * t.unfolding()).transpose();
  return T(t.order() - 1, t.dim(), std::move(out), typename T::AssumeSymmetric{});
}

// T[v_1, ..., v_m, ., ..., .]
template <typename Scalar>
SymTensor<Scalar> partial_contract(const SymTensor<Scalar>& t,
                                   std::span<const typename SymTensor<Scalar>::Vector> vs) {
  if (vs.empty() || static_cast<int>(vs.size()) > t.order()) {
    throw ConfigError("partial_contract: need 1 <= m <= order vectors");
  }
  SymTensor<Scalar> out = t;
  for (const auto& v : vs) out = contract_leading(out, v);
  return out;
}

// T[v, ..., v (m times), ., ..., .]
template <typename Scalar>
SymTensor<Scalar> contract_power(const SymTensor<Scalar>& t, const typename SymTensor<Scalar>::Vector& v, int m) {
  SymTensor<Scalar> out = t;
  for (int i = 0; i < m; ++i) out = contract_leading(out, v);
  return out;
}

// <T, v^{(x) m}>
template <typename Scalar>
Scalar full_contract(const SymTensor<Scalar>& t, const typename SymTensor<Scalar>::Vector& v) {
  return contract_power(t, v, t.order()).value();
}

}  // namespace gsbm
