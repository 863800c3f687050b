#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace solflow {

using Index = std::int64_t;

enum class Topology { Periodic, Truncated };

/// Rectangular tensor-product grid carrying the reference volume form.
///
/// The density field stores dOmega/dx against the coordinate Lebesgue
/// measure. Truncated axes hold their endpoints (spacing = (b-a)/(m-1));
/// periodic axes cover [a, a+L) without a duplicated endpoint.
template <class Scalar>
class GridT {
public:
  using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridT() = default;

  GridT(int dim, std::array<int, 3> extents, std::array<Scalar, 3> origin,
        std::array<Scalar, 3> spacing, std::array<Topology, 3> topology)
      : dim_(dim), extents_(extents), origin_(origin), spacing_(spacing), topology_(topology) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
    size_ = 1;
    for (int a = 0; a < dim_; ++a) {
      if (extents_[a] < 4) throw std::invalid_argument("grid axis needs at least 4 points");
      if (spacing_[a] <= Scalar(0)) throw std::invalid_argument("grid spacing must be positive");
      size_ *= extents_[a];
    }
    omega_ = ArrayX::Ones(size_);
    log_omega_ = ArrayX::Zero(size_);
  }

  int dim() const { return dim_; }
  Index size() const { return size_; }
  int extent(int axis) const { return extents_[axis]; }
  Scalar spacing(int axis) const { return spacing_[axis]; }
  Scalar origin(int axis) const { return origin_[axis]; }
  Topology topology(int axis) const { return topology_[axis]; }

  Scalar min_spacing() const {
    Scalar h = spacing_[0];
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
    return h;
  }

  /// Cell volume of the coordinate measure.
  Scalar cell_volume() const {
    Scalar v(1);
    for (int a = 0; a < dim_; ++a) v *= spacing_[a];
    return v;
  }

  Scalar coord(int axis, int i) const { return origin_[axis] + spacing_[axis] * Scalar(i); }

  Index flatten(const std::array<int, 3>& idx) const {
    Index p = 0;
    for (int a = 0; a < dim_; ++a) p = p * extents_[a] + idx[a];
    return p;
  }

  std::array<int, 3> unflatten(Index p) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(p % extents_[a]);
      p /= extents_[a];
    }
    return idx;
  }

  std::array<Scalar, 3> point(Index p) const {
    auto idx = unflatten(p);
    std::array<Scalar, 3> x{0, 0, 0};
    for (int a = 0; a < dim_; ++a) x[a] = coord(a, idx[a]);
    return x;
  }

  /// Neighbour along an axis; periodic axes wrap, truncated axes clamp into
  /// range only through valid offsets (callers use one-sided stencils there).
  Index shift(Index p, int axis, int offset) const {
    auto idx = unflatten(p);
    int m = extents_[axis];
    int i = idx[axis] + offset;
    if (topology_[axis] == Topology::Periodic) {
      i %= m;
      if (i < 0) i += m;
    } else {
      if (i < 0 || i >= m) throw std::out_of_range("stencil reaches outside truncated axis");
    }
    idx[axis] = i;
    return flatten(idx);
  }

  const ArrayX& omega() const { return omega_; }
  const ArrayX& log_omega() const { return log_omega_; }

  /// Density threshold separating the Gaussian tail from the bulk region;
  /// residual sup-norms are taken over the bulk.
  Scalar tail_cutoff() const { return tail_cutoff_; }
  void set_tail_cutoff(Scalar c) { tail_cutoff_ = c; }
  bool in_bulk(Index p) const { return omega_[p] >= tail_cutoff_; }

  void set_omega(ArrayX density) {
    if (density.size() != size_) throw std::invalid_argument("omega density size mismatch");
    if (!(density > Scalar(0)).all()) throw std::invalid_argument("omega density must be positive");
    omega_ = std::move(density);
    log_omega_ = omega_.log();
  }

  /// Largest density value on the outermost layers of truncated axes.
  /// Construction-time sanity check for Gaussian-tail truncation.
  Scalar boundary_density_max() const {
    Scalar m(0);
    for (Index p = 0; p < size_; ++p) {
      auto idx = unflatten(p);
      for (int a = 0; a < dim_; ++a) {
        if (topology_[a] != Topology::Truncated) continue;
        if (idx[a] == 0 || idx[a] == extents_[a] - 1) {
          m = std::max(m, omega_[p]);
          break;
        }
      }
    }
    return m;
  }

  bool has_truncated_axis() const {
    for (int a = 0; a < dim_; ++a)
      if (topology_[a] == Topology::Truncated) return true;
    return false;
  }

private:
  int dim_ = 0;
  std::array<int, 3> extents_{1, 1, 1};
  std::array<Scalar, 3> origin_{0, 0, 0};
  std::array<Scalar, 3> spacing_{1, 1, 1};
  std::array<Topology, 3> topology_{Topology::Periodic, Topology::Periodic, Topology::Periodic};
  Index size_ = 0;
  Scalar tail_cutoff_ = Scalar(1e-10);
  ArrayX omega_;
  ArrayX log_omega_;
};

using Grid = GridT<double>;

/// Deterministic pairwise-tree sum; fixed association order independent of
/// traversal chunking.
template <class Scalar>
Scalar pairwise_sum(const Scalar* data, Index count) {
  if (count <= 8) {
    Scalar s(0);
    for (Index i = 0; i < count; ++i) s += data[i];
    return s;
  }
  Index half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

}  // namespace solflow
