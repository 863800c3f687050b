#pragma once

#include "solflow/grid.hpp"

#include <Eigen/Core>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace solflow {

inline int pow_int(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Counting iterator over a rank-q multi-index in {0..n-1}^q.
inline bool advance_multi(int n, int q, std::array<int, 6>& idx) {
  for (int s = q - 1; s >= 0; --s) {
    if (++idx[s] < n) return true;
    idx[s] = 0;
  }
  return false;
}

/// Tensor field over a grid: a plain covariant q-tensor, or a
/// tangent-vector-valued covariant q-tensor (q argument slots plus one
/// contravariant value slot). Endomorphism fields are the q = 1
/// vector-valued case; curvature fields the q = 3 one.
///
/// Per-point layout is row-major over (i_1, ..., i_q) with the value
/// components innermost, so the trailing (i_q, value) block of a
/// vector-valued field maps column-major onto the endomorphism matrix
/// acting on the last argument.
template <class Scalar>
class TensorFieldT {
public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using EndoView = Eigen::Map<MatX>;                     // column-major: (value, last arg)
  using ConstEndoView = Eigen::Map<const MatX>;
  using Mat2View = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstMat2View =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using VecView = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
  using ConstVecView = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

  TensorFieldT() = default;

  static TensorFieldT covariant(const GridT<Scalar>& grid, int order) {
    return TensorFieldT(grid, order, false);
  }
  static TensorFieldT vector_valued(const GridT<Scalar>& grid, int order) {
    return TensorFieldT(grid, order, true);
  }
  static TensorFieldT scalar(const GridT<Scalar>& grid) { return TensorFieldT(grid, 0, false); }

  const GridT<Scalar>& grid() const { return *grid_; }
  int order() const { return order_; }
  bool vector_valued() const { return vector_valued_; }
  int dim() const { return grid_->dim(); }
  Index points() const { return grid_->size(); }
  int comps() const { return static_cast<int>(data_.cols()); }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  bool same_shape(const TensorFieldT& o) const {
    return grid_ == o.grid_ && order_ == o.order_ && vector_valued_ == o.vector_valued_;
  }

  Scalar* ptr(Index p) { return data_.data() + p * comps(); }
  const Scalar* ptr(Index p) const { return data_.data() + p * comps(); }

  /// Scalar element, all argument slots given (value slot last when present).
  Scalar& at(Index p, const std::array<int, 6>& args, int value = 0) {
    return data_(p, offset(args, value));
  }
  Scalar at(Index p, const std::array<int, 6>& args, int value = 0) const {
    return data_(p, offset(args, value));
  }

  Scalar& scalar_at(Index p) { return data_(p, 0); }
  Scalar scalar_at(Index p) const { return data_(p, 0); }

  /// Endomorphism acting on the last argument slot, for vector-valued fields
  /// with order >= 1. `outer` is the flat multi-index over slots 1..q-1.
  EndoView endo(Index p, int outer = 0) {
    int n = dim();
    return EndoView(ptr(p) + outer * n * n, n, n);
  }
  ConstEndoView endo(Index p, int outer = 0) const {
    int n = dim();
    return ConstEndoView(ptr(p) + outer * n * n, n, n);
  }

  /// Value vector at a full argument multi-index (vector-valued fields).
  VecView value(Index p, int args_flat = 0) {
    int n = dim();
    return VecView(ptr(p) + args_flat * n, n);
  }
  ConstVecView value(Index p, int args_flat = 0) const {
    int n = dim();
    return ConstVecView(ptr(p) + args_flat * n, n);
  }

  /// Matrix over the two trailing argument slots of a plain field
  /// (entry (i, j) = component (..., i, j)).
  Mat2View mat2(Index p, int outer = 0) {
    int n = dim();
    return Mat2View(ptr(p) + outer * n * n, n, n);
  }
  ConstMat2View mat2(Index p, int outer = 0) const {
    int n = dim();
    return ConstMat2View(ptr(p) + outer * n * n, n, n);
  }

  int outer_count() const {  // flat size of slots 1..q-1 (for endo views)
    return pow_int(dim(), order_ > 0 ? order_ - 1 : 0);
  }
  int args_count() const { return pow_int(dim(), order_); }

  void set_zero() { data_.setZero(); }

  TensorFieldT& operator+=(const TensorFieldT& o) {
    check(o);
    data_ += o.data_;
    return *this;
  }
  TensorFieldT& operator-=(const TensorFieldT& o) {
    check(o);
    data_ -= o.data_;
    return *this;
  }
  TensorFieldT& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }

  friend TensorFieldT operator+(TensorFieldT a, const TensorFieldT& b) { return a += b; }
  friend TensorFieldT operator-(TensorFieldT a, const TensorFieldT& b) { return a -= b; }
  friend TensorFieldT operator*(Scalar s, TensorFieldT a) { return a *= s; }
  friend TensorFieldT operator*(TensorFieldT a, Scalar s) { return a *= s; }
  friend TensorFieldT operator-(TensorFieldT a) {
    a.data_ = -a.data_;
    return a;
  }

  Scalar max_abs() const { return data_.size() ? data_.abs().maxCoeff() : Scalar(0); }
  bool all_finite() const { return data_.isFinite().all(); }

private:
  TensorFieldT(const GridT<Scalar>& grid, int order, bool vector_valued)
      : grid_(&grid), order_(order), vector_valued_(vector_valued) {
    if (order < 0 || order > 6) throw std::invalid_argument("tensor order out of range");
    int c = pow_int(grid.dim(), order) * (vector_valued ? grid.dim() : 1);
    data_ = Storage::Zero(grid.size(), c);
  }

  int offset(const std::array<int, 6>& args, int value) const {
    int n = dim();
    int f = 0;
    for (int s = 0; s < order_; ++s) f = f * n + args[s];
    return vector_valued_ ? f * n + value : f;
  }

  void check(const TensorFieldT& o) const {
    if (!same_shape(o)) throw std::invalid_argument("tensor field shape mismatch");
  }

  const GridT<Scalar>* grid_ = nullptr;
  int order_ = 0;
  bool vector_valued_ = false;
  Storage data_;
};

using TensorField = TensorFieldT<double>;

// ---------------------------------------------------------------------------
// Finite-difference stencils
// ---------------------------------------------------------------------------

/// Per-component partial derivative along a coordinate axis.
/// order 1 or 2 (first or second derivative); accuracy 2 (default) or 4.
/// Truncated axes switch to one-sided stencils on the boundary layers.
template <class Scalar>
TensorFieldT<Scalar> fd_partial(const TensorFieldT<Scalar>& f, int axis, int order,
                                int accuracy = 2) {
  const GridT<Scalar>& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("fd_partial: axis out of range");
  if (order != 1 && order != 2) throw std::invalid_argument("fd_partial: order must be 1 or 2");
  if (accuracy != 2 && accuracy != 4) throw std::invalid_argument("fd_partial: accuracy 2 or 4");

  TensorFieldT<Scalar> out = f;
  out.set_zero();
  const Scalar h = g.spacing(axis);
  const int m = g.extent(axis);
  const bool truncated = g.topology(axis) == Topology::Truncated;

  struct Stencil {
    int count;
    std::array<int, 6> off;
    std::array<Scalar, 6> w;
  };

  auto central2 = [&](int order_) -> Stencil {
    if (order_ == 1) return {2, {-1, 1}, {Scalar(-0.5) / h, Scalar(0.5) / h}};
    return {3, {-1, 0, 1}, {Scalar(1) / (h * h), Scalar(-2) / (h * h), Scalar(1) / (h * h)}};
  };
  auto central4 = [&](int order_) -> Stencil {
    if (order_ == 1)
      return {4,
              {-2, -1, 1, 2},
              {Scalar(1) / (12 * h), Scalar(-8) / (12 * h), Scalar(8) / (12 * h),
               Scalar(-1) / (12 * h)}};
    return {5,
            {-2, -1, 0, 1, 2},
            {Scalar(-1) / (12 * h * h), Scalar(16) / (12 * h * h), Scalar(-30) / (12 * h * h),
             Scalar(16) / (12 * h * h), Scalar(-1) / (12 * h * h)}};
  };
  // One-sided stencils for truncated boundaries, built with the same leading
  // truncation-error coefficient as the interior central stencils so that
  // composed derivatives keep second order up to the boundary.
  auto forward2 = [&](int order_) -> Stencil {
    if (order_ == 1)
      return {4,
              {0, 1, 2, 3},
              {Scalar(-2) / h, Scalar(3.5) / h, Scalar(-2) / h, Scalar(0.5) / h}};
    return {5,
            {0, 1, 2, 3, 4},
            {Scalar(3) / (h * h), Scalar(-9) / (h * h), Scalar(10) / (h * h),
             Scalar(-5) / (h * h), Scalar(1) / (h * h)}};
  };

  const int halo = accuracy / 2;
  for (Index p = 0; p < g.size(); ++p) {
    auto idx = g.unflatten(p);
    const int i = idx[axis];
    Stencil st;
    bool mirror = false;
    if (!truncated) {
      st = (accuracy == 4) ? central4(order) : central2(order);
    } else if (i >= halo && i <= m - 1 - halo) {
      st = (accuracy == 4) ? central4(order) : central2(order);
    } else if (i >= 1 && i <= m - 2) {
      st = central2(order);  // inner boundary layer of the wide stencil
    } else {
      st = forward2(order);
      mirror = (i == m - 1);
    }
    auto row = out.data().row(p);
    for (int k = 0; k < st.count; ++k) {
      int off = mirror ? -st.off[k] : st.off[k];
      Scalar w = st.w[k];
      if (mirror && order == 1) w = -w;
      row += w * f.data().row(g.shift(p, axis, off));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Omega-weighted integration
// ---------------------------------------------------------------------------

/// Quadrature weight of a point against the coordinate measure:
/// product of spacings, halved on endpoints of truncated axes.
template <class Scalar>
Scalar quad_weight(const GridT<Scalar>& g, Index p) {
  Scalar w = g.cell_volume();
  auto idx = g.unflatten(p);
  for (int a = 0; a < g.dim(); ++a) {
    if (g.topology(a) == Topology::Truncated && (idx[a] == 0 || idx[a] == g.extent(a) - 1))
      w *= Scalar(0.5);
  }
  return w;
}

/// Integral of a scalar field against the reference volume form.
template <class Scalar>
Scalar integrate_omega(const TensorFieldT<Scalar>& f) {
  if (f.order() != 0 || f.vector_valued())
    throw std::invalid_argument("integrate_omega expects a scalar field");
  if (!f.all_finite()) throw std::domain_error("integrate_omega: non-finite value in field");
  const GridT<Scalar>& g = f.grid();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> terms(g.size());
  for (Index p = 0; p < g.size(); ++p)
    terms[p] = f.scalar_at(p) * g.omega()[p] * quad_weight(g, p);
  return pairwise_sum(terms.data(), g.size());
}

}  // namespace solflow
