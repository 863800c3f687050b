#pragma once

// Test-only reference computations, kept independent of the library paths
// they are used to check.

#include <Eigen/Core>

#include <cmath>
#include <functional>

namespace oracles {

/// Adaptive Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                      int depth = 28) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
          int d) -> double {
    double m = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
    double flm = f(lm), frm = f(rm);
    double left = (m - lo) / 6 * (flo + 4 * flm + fmid);
    double right = (hi - m) / 6 * (fmid + 4 * frm + fhi);
    double both = left + right;
    if (d <= 0 || std::abs(both - whole) < 15 * eps) return both + (both - whole) / 15;
    return rec(lo, m, flo, flm, fmid, left, eps / 2, d - 1) +
           rec(m, hi, fmid, frm, fhi, right, eps / 2, d - 1);
  };
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (f(a) + 4 * fm + f(b));
  return rec(a, b, f(a), fm, f(b), whole, tol, depth);
}

/// Matrix exponential by scaling-and-squaring on a plain Taylor series.
inline Eigen::MatrixXd expm_series(const Eigen::MatrixXd& A) {
  int s = 0;
  double norm = A.cwiseAbs().sum();
  while (norm > 0.25) {
    norm /= 2;
    ++s;
  }
  Eigen::MatrixXd B = A / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * B / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace oracles
