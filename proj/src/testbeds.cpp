#include "solflow/testbeds.hpp"

#include "solflow/algebra.hpp"

namespace solflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::unique_ptr<Grid> gaussian_grid(int dim, int points_per_axis, double half_width) {
  std::array<int, 3> ext{1, 1, 1};
  std::array<double, 3> org{0, 0, 0}, sp{1, 1, 1};
  std::array<Topology, 3> topo{Topology::Truncated, Topology::Truncated, Topology::Truncated};
  for (int a = 0; a < dim; ++a) {
    ext[a] = points_per_axis;
    org[a] = -half_width;
    sp[a] = 2 * half_width / (points_per_axis - 1);
  }
  auto grid = std::make_unique<Grid>(dim, ext, org, sp, topo);
  Grid::ArrayX omega(grid->size());
  for (Index p = 0; p < grid->size(); ++p) {
    auto x = grid->point(p);
    double r2 = 0;
    for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
    omega[p] = std::exp(-0.5 * r2);
  }
  grid->set_omega(omega);
  return grid;
}

std::unique_ptr<Grid> torus_grid(int dim, int points_per_axis, double length) {
  std::array<int, 3> ext{1, 1, 1};
  std::array<double, 3> org{0, 0, 0}, sp{1, 1, 1};
  std::array<Topology, 3> topo{Topology::Periodic, Topology::Periodic, Topology::Periodic};
  for (int a = 0; a < dim; ++a) {
    ext[a] = points_per_axis;
    sp[a] = length / points_per_axis;
  }
  return std::make_unique<Grid>(dim, ext, org, sp, topo);
}

std::unique_ptr<Grid> weighted_circle_grid(int points) {
  auto grid = torus_grid(1, points);
  Grid::ArrayX omega(grid->size());
  for (Index p = 0; p < grid->size(); ++p) omega[p] = std::exp(-std::cos(grid->point(p)[0]));
  grid->set_omega(omega);
  return grid;
}

TensorField euclidean_metric(const Grid& grid) {
  return constant_metric(grid, Mat::Identity(grid.dim(), grid.dim()));
}

TensorField constant_metric(const Grid& grid, const Mat& coefficients) {
  TensorField g = TensorField::covariant(grid, 2);
  for (Index p = 0; p < grid.size(); ++p) g.mat2(p) = coefficients;
  return g;
}

void set_omega_from_metric(Grid& grid, const TensorField& g) {
  Grid::ArrayX omega(grid.size());
  TensorField det = det2(g);
  for (Index p = 0; p < grid.size(); ++p) omega[p] = std::sqrt(det.scalar_at(p));
  grid.set_omega(omega);
}

namespace {

/// Smooth per-axis basis functions; on periodic axes these are the first
/// harmonics, on truncated axes half-period harmonics of the box.
double axis_mode(const Grid& grid, int axis, int mode, bool cosine, double x) {
  double L = grid.topology(axis) == Topology::Periodic
                 ? grid.spacing(axis) * grid.extent(axis)
                 : grid.spacing(axis) * (grid.extent(axis) - 1);
  double k = 2 * kPi * mode / L;
  if (grid.topology(axis) == Topology::Truncated) k = kPi * mode / L;
  double s = x - grid.origin(axis);
  return cosine ? std::cos(k * s) : std::sin(k * s);
}

}  // namespace

TensorField random_scalar(const Grid& grid, Rng& rng, int modes, double amplitude) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  struct Term {
    std::array<int, 3> mode;
    std::array<bool, 3> cosine;
    double coeff;
  };
  std::vector<Term> terms;
  int count = 2 * modes;
  for (int t = 0; t < count; ++t) {
    Term term;
    for (int a = 0; a < grid.dim(); ++a) {
      term.mode[a] = 1 + static_cast<int>((unif(rng) + 1.0) * 0.5 * modes);
      if (term.mode[a] > modes) term.mode[a] = modes;
      term.cosine[a] = unif(rng) > 0;
    }
    term.coeff = unif(rng) / count;
    terms.push_back(term);
  }
  TensorField f = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) {
    auto x = grid.point(p);
    double acc = 0;
    for (const auto& term : terms) {
      double v = term.coeff;
      for (int a = 0; a < grid.dim(); ++a)
        v *= axis_mode(grid, a, term.mode[a], term.cosine[a], x[a]);
      acc += v;
    }
    f.scalar_at(p) = amplitude * acc;
  }
  return f;
}

TensorField random_symmetric_endo(const Grid& grid, Rng& rng, int modes, double amplitude) {
  const int n = grid.dim();
  TensorField out = TensorField::vector_valued(grid, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      TensorField s = random_scalar(grid, rng, modes, amplitude);
      for (Index p = 0; p < grid.size(); ++p) {
        out.endo(p)(i, j) = s.scalar_at(p);
        out.endo(p)(j, i) = s.scalar_at(p);
      }
    }
  return out;
}

TensorField random_symmetric_2tensor(const Grid& grid, Rng& rng, int modes, double amplitude) {
  const int n = grid.dim();
  TensorField out = TensorField::covariant(grid, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      TensorField s = random_scalar(grid, rng, modes, amplitude);
      for (Index p = 0; p < grid.size(); ++p) {
        out.mat2(p)(i, j) = s.scalar_at(p);
        out.mat2(p)(j, i) = s.scalar_at(p);
      }
    }
  return out;
}

TensorField random_metric_near(const Grid& grid, const TensorField& base, Rng& rng,
                               double amplitude, int modes) {
  TensorField g = base + random_symmetric_2tensor(grid, rng, modes, amplitude);
  for (Index p = 0; p < grid.size(); ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(g.mat2(p)));
    if (es.eigenvalues().minCoeff() <= 0)
      throw std::runtime_error("random_metric_near: perturbation broke positivity");
  }
  return g;
}

TensorField conformal_metric(const Grid& grid, const TensorField& u) {
  TensorField g = TensorField::covariant(grid, 2);
  for (Index p = 0; p < grid.size(); ++p)
    g.mat2(p) = std::exp(2.0 * u.scalar_at(p)) * Mat::Identity(grid.dim(), grid.dim());
  return g;
}

TensorField random_gsym_endo(const Grid& grid, const TensorField& g0, Rng& rng, int modes,
                             double amplitude) {
  TensorField v = random_symmetric_2tensor(grid, rng, modes, amplitude);
  return endo_of(grid, g0, v);
}

}  // namespace solflow
