#include "solflow/algebra.hpp"

namespace solflow {

namespace {

void require_rank2(const TensorField& f, const char* what) {
  if (f.order() != 2 && !(f.vector_valued() && f.order() == 1))
    throw std::invalid_argument(std::string(what) + ": rank-2 field expected");
}

void require_endo(const TensorField& f, const char* what) {
  if (!f.vector_valued() || f.order() != 1)
    throw std::invalid_argument(std::string(what) + ": endomorphism field expected");
}

void require_plain2(const TensorField& f, const char* what) {
  if (f.vector_valued() || f.order() != 2)
    throw std::invalid_argument(std::string(what) + ": plain 2-tensor field expected");
}

}  // namespace

TensorField inverse2(const TensorField& g) {
  require_plain2(g, "inverse2");
  TensorField out = g;
  for (Index p = 0; p < g.points(); ++p) {
    Mat m = g.mat2(p);
    double det = m.determinant();
    if (det == 0.0 || !std::isfinite(det)) throw std::domain_error("inverse2: singular matrix");
    out.mat2(p) = m.inverse();
  }
  return out;
}

TensorField endo_of(const Grid& grid, const TensorField& g, const TensorField& u) {
  require_plain2(g, "endo_of");
  require_plain2(u, "endo_of");
  TensorField out = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < g.points(); ++p) {
    Mat G = g.mat2(p);
    out.endo(p) = G.llt().solve(Mat(u.mat2(p)));
  }
  return out;
}

TensorField lower_endo(const Grid& grid, const TensorField& g, const TensorField& H) {
  require_plain2(g, "lower_endo");
  require_endo(H, "lower_endo");
  TensorField out = TensorField::covariant(grid, 2);
  for (Index p = 0; p < g.points(); ++p) {
    Mat G = g.mat2(p);
    Mat E = H.endo(p);
    out.mat2(p) = E.transpose() * G;  // u(e_i, e_j) = g(H e_i, e_j)
  }
  return out;
}

TensorField endo_mult(const TensorField& A, const TensorField& B) {
  require_endo(A, "endo_mult");
  require_endo(B, "endo_mult");
  TensorField out = A;
  for (Index p = 0; p < A.points(); ++p) out.endo(p) = Mat(A.endo(p)) * Mat(B.endo(p));
  return out;
}

TensorField endo_commutator(const TensorField& A, const TensorField& B) {
  require_endo(A, "endo_commutator");
  require_endo(B, "endo_commutator");
  TensorField out = A;
  for (Index p = 0; p < A.points(); ++p) {
    Mat a = A.endo(p), b = B.endo(p);
    out.endo(p) = a * b - b * a;
  }
  return out;
}

TensorField trace_endo(const TensorField& H) {
  require_endo(H, "trace_endo");
  TensorField out = TensorField::scalar(H.grid());
  for (Index p = 0; p < H.points(); ++p) out.scalar_at(p) = H.endo(p).trace();
  return out;
}

TensorField trace_g(const TensorField& g, const TensorField& u) {
  require_plain2(g, "trace_g");
  require_plain2(u, "trace_g");
  TensorField out = TensorField::scalar(g.grid());
  for (Index p = 0; p < g.points(); ++p) {
    Mat G = g.mat2(p);
    out.scalar_at(p) = G.llt().solve(Mat(u.mat2(p))).trace();
  }
  return out;
}

TensorField endo_apply(const TensorField& H, const TensorField& v) {
  require_endo(H, "endo_apply");
  if (!v.vector_valued() || v.order() != 0)
    throw std::invalid_argument("endo_apply: vector field expected");
  TensorField out = v;
  for (Index p = 0; p < H.points(); ++p) out.value(p) = Mat(H.endo(p)) * Vec(v.value(p));
  return out;
}

TensorField identity_endo(const Grid& grid) {
  TensorField out = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p) out.endo(p) = Mat::Identity(grid.dim(), grid.dim());
  return out;
}

TensorField det2(const TensorField& g) {
  require_plain2(g, "det2");
  TensorField out = TensorField::scalar(g.grid());
  for (Index p = 0; p < g.points(); ++p) out.scalar_at(p) = g.mat2(p).determinant();
  return out;
}

TensorField scale_pointwise(const TensorField& A, const TensorField& s) {
  if (s.order() != 0 || s.vector_valued())
    throw std::invalid_argument("scale_pointwise: scalar field expected");
  TensorField out = A;
  for (Index p = 0; p < A.points(); ++p) out.data().row(p) *= s.scalar_at(p);
  return out;
}

TensorField transpose_endo_g(const TensorField& g, const TensorField& H) {
  require_plain2(g, "transpose_endo_g");
  require_endo(H, "transpose_endo_g");
  TensorField out = H;
  for (Index p = 0; p < g.points(); ++p) {
    Mat G = g.mat2(p);
    out.endo(p) = G.llt().solve(Mat(H.endo(p)).transpose() * G);
  }
  return out;
}

TensorField transpose_g_last(const TensorField& g, const TensorField& A) {
  if (!A.vector_valued() || A.order() != 2)
    throw std::invalid_argument("transpose_g_last: vector-valued 2-tensor expected");
  TensorField out = A;
  int n = A.dim();
  for (Index p = 0; p < A.points(); ++p) {
    Mat G = g.mat2(p);
    auto llt = G.llt();
    for (int i = 0; i < n; ++i) out.endo(p, i) = llt.solve(Mat(A.endo(p, i)).transpose() * G);
  }
  return out;
}

TensorField pointwise_inner_g(const TensorField& g, const TensorField& u, const TensorField& v) {
  if (!u.same_shape(v)) throw std::invalid_argument("pointwise_inner_g: shape mismatch");
  require_plain2(g, "pointwise_inner_g");
  const Grid& grid = u.grid();
  const int n = u.dim();
  const int q = u.order();
  const bool vv = u.vector_valued();
  TensorField out = TensorField::scalar(grid);

  std::array<int, 6> I{}, J{};
  for (Index p = 0; p < grid.size(); ++p) {
    Mat G = g.mat2(p);
    Mat Gi = G.inverse();
    double acc = 0.0;
    I.fill(0);
    do {
      J.fill(0);
      do {
        double w = 1.0;
        for (int s = 0; s < q; ++s) w *= Gi(I[s], J[s]);
        if (w == 0.0) continue;
        if (vv) {
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              acc += w * G(a, b) * u.at(p, I, a) * v.at(p, J, b);
        } else {
          acc += w * u.at(p, I) * v.at(p, J);
        }
      } while (advance_multi(n, q, J));
    } while (advance_multi(n, q, I));
    out.scalar_at(p) = acc;
  }
  return out;
}

TensorField pointwise_norm2_g(const TensorField& g, const TensorField& u) {
  return pointwise_inner_g(g, u, u);
}

double sup_norm_g(const TensorField& g, const TensorField& u) {
  TensorField n2 = pointwise_norm2_g(g, u);
  double m = 0.0;
  for (Index p = 0; p < u.points(); ++p) m = std::max(m, n2.scalar_at(p));
  return std::sqrt(std::max(0.0, m));
}

double bulk_sup_norm_g(const TensorField& g, const TensorField& u) {
  TensorField n2 = pointwise_norm2_g(g, u);
  double m = 0.0;
  for (Index p = 0; p < u.points(); ++p)
    if (u.grid().in_bulk(p)) m = std::max(m, n2.scalar_at(p));
  return std::sqrt(std::max(0.0, m));
}

Mat sym_matrix_function(const Mat& S, double (*fn)(double), bool require_positive) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Vec lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (require_positive && lam[i] <= 0.0)
      throw std::domain_error("matrix function requires positive eigenvalues");
    lam[i] = fn(lam[i]);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Mat gsym_matrix_function(const Mat& G, const Mat& M, double (*fn)(double), bool require_positive) {
  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success) throw std::domain_error("metric not positive definite");
  Mat L = llt.matrixL();
  // S = L^T M L^{-T} is symmetric iff M is g-symmetric.
  Mat X = L.triangularView<Eigen::Lower>().solve(M.transpose()).transpose();  // M L^{-T}
  Mat S = L.transpose() * X;
  S = 0.5 * (S + S.transpose());
  Mat FS = sym_matrix_function(S, fn, require_positive);
  // back: f(M) = L^{-T} f(S) L^T
  return L.transpose().triangularView<Eigen::Upper>().solve(FS) * L.transpose();
}

namespace {

double fn_exp(double x) { return std::exp(x); }
double fn_log(double x) { return std::log(x); }
double fn_sqrt(double x) { return std::sqrt(x); }

TensorField map_endo(const TensorField& A, double (*fn)(double), bool require_positive) {
  require_endo(A, "matrix function");
  TensorField out = A;
  for (Index p = 0; p < A.points(); ++p) {
    Mat S = A.endo(p);
    S = 0.5 * (S + S.transpose());
    out.endo(p) = sym_matrix_function(S, fn, require_positive);
  }
  return out;
}

TensorField map_endo_g(const TensorField& g, const TensorField& M, double (*fn)(double),
                       bool require_positive) {
  require_endo(M, "matrix function");
  TensorField out = M;
  for (Index p = 0; p < M.points(); ++p)
    out.endo(p) = gsym_matrix_function(g.mat2(p), M.endo(p), fn, require_positive);
  return out;
}

}  // namespace

TensorField endo_exp(const TensorField& A) { return map_endo(A, fn_exp, false); }
TensorField endo_log(const TensorField& B) { return map_endo(B, fn_log, true); }
TensorField endo_exp_g(const TensorField& g, const TensorField& M) {
  return map_endo_g(g, M, fn_exp, false);
}
TensorField endo_log_g(const TensorField& g, const TensorField& M) {
  return map_endo_g(g, M, fn_log, true);
}
TensorField endo_sqrt_g(const TensorField& g, const TensorField& M) {
  return map_endo_g(g, M, fn_sqrt, true);
}

double min_eigenvalue_g(const TensorField& g, const TensorField& M) {
  double m = std::numeric_limits<double>::infinity();
  for (Index p = 0; p < M.points(); ++p) {
    Mat G = g.mat2(p);
    Mat L = Mat(G.llt().matrixL());
    Mat X = L.triangularView<Eigen::Lower>().solve(Mat(M.endo(p)).transpose()).transpose();
    Mat S = L.transpose() * X;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

double asymmetry_g(const TensorField& g, const TensorField& M) {
  double m = 0.0;
  for (Index p = 0; p < M.points(); ++p) {
    Mat GM = Mat(g.mat2(p)) * Mat(M.endo(p));
    m = std::max(m, (GM - GM.transpose()).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace solflow
