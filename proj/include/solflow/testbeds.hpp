#pragma once

#include "solflow/algebra.hpp"
#include "solflow/field.hpp"
#include "solflow/grid.hpp"

#include <memory>
#include <random>

namespace solflow {

using Rng = std::mt19937_64;

/// Euclidean metric with Gaussian weight exp(-|x|^2/2) on a truncated box.
/// The canonical testbed: the Euclidean metric is a shrinking soliton here.
std::unique_ptr<Grid> gaussian_grid(int dim, int points_per_axis, double half_width = 8.0);

/// Flat periodic box [0, 2 pi)^dim with a constant metric and Omega = dV.
std::unique_ptr<Grid> torus_grid(int dim, int points_per_axis, double length = 2 * 3.14159265358979323846);

/// 1D circle with weight exp(-cos x).
std::unique_ptr<Grid> weighted_circle_grid(int points);

/// Euclidean metric field (identity coefficients).
TensorField euclidean_metric(const Grid& grid);

/// Constant-coefficient metric field.
TensorField constant_metric(const Grid& grid, const Mat& coefficients);

/// Set the weight of a torus grid from dV of a metric field.
void set_omega_from_metric(Grid& grid, const TensorField& g);

/// Band-limited random scalar: sum of at most `modes` low harmonics per axis.
TensorField random_scalar(const Grid& grid, Rng& rng, int modes = 4, double amplitude = 1.0);

/// Random coordinate-symmetric endomorphism field with band-limited entries.
TensorField random_symmetric_endo(const Grid& grid, Rng& rng, int modes = 4,
                                  double amplitude = 1.0);

/// Random symmetric 2-tensor field (plain).
TensorField random_symmetric_2tensor(const Grid& grid, Rng& rng, int modes = 4,
                                     double amplitude = 1.0);

/// Random metric: base + amplitude-bounded symmetric perturbation, checked SPD.
TensorField random_metric_near(const Grid& grid, const TensorField& base, Rng& rng,
                               double amplitude, int modes = 4);

/// Conformally flat metric exp(2u) delta with a band-limited u (2D: curved).
TensorField conformal_metric(const Grid& grid, const TensorField& u);

/// g0-symmetric random endomorphism (for geodesic velocities etc.).
TensorField random_gsym_endo(const Grid& grid, const TensorField& g0, Rng& rng, int modes = 4,
                             double amplitude = 1.0);

}  // namespace solflow
