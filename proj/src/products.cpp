#include "solflow/products.hpp"

namespace solflow {

namespace {

std::array<int, 6> with_slot(std::array<int, 6> idx, int slot, int val) {
  idx[slot] = val;
  return idx;
}

// Build a full multi-index from a reduced one by inserting `val` at `slot`.
std::array<int, 6> inserted(const std::array<int, 6>& reduced, int q_reduced, int slot, int val) {
  std::array<int, 6> full{};
  for (int s = 0, r = 0; s <= q_reduced; ++s) {
    if (s == slot)
      full[s] = val;
    else
      full[s] = reduced[r++];
  }
  return full;
}

void require_vv(const TensorField& A, int order, const char* what) {
  if (!A.vector_valued() || A.order() != order)
    throw std::invalid_argument(std::string(what) + ": unexpected field shape");
}

}  // namespace

TensorField alt2(const TensorField& A, int s1, int s2) {
  if (A.order() < 2) throw std::invalid_argument("alt2: field needs two argument slots");
  TensorField out = A;
  const int n = A.dim();
  const int vals = A.vector_valued() ? n : 1;
  std::array<int, 6> I{};
  do {
    auto J = I;
    std::swap(J[s1], J[s2]);
    for (Index p = 0; p < A.points(); ++p)
      for (int a = 0; a < vals; ++a) out.at(p, I, a) = A.at(p, I, a) - A.at(p, J, a);
  } while (advance_multi(n, A.order(), I));
  return out;
}

TensorField bullet_endo(const TensorField& H, const TensorField& A, int slot) {
  if (slot < 0 || slot >= A.order()) throw std::invalid_argument("bullet_endo: bad slot");
  TensorField out = A;
  out.set_zero();
  const int n = A.dim();
  const int vals = A.vector_valued() ? n : 1;
  std::array<int, 6> I{};
  do {
    for (Index p = 0; p < A.points(); ++p) {
      auto He = H.endo(p);
      for (int a = 0; a < vals; ++a) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += He(k, I[slot]) * A.at(p, with_slot(I, slot, k), a);
        out.at(p, I, a) = acc;
      }
    }
  } while (advance_multi(n, A.order(), I));
  return out;
}

TensorField endo_neg(const TensorField& H, const TensorField& A) {
  if (A.order() != 2) throw std::invalid_argument("endo_neg: 2-argument tensor expected");
  return bullet_endo(H, A, 0) + bullet_endo(H, A, 1);
}

TensorField compose_value(const TensorField& H, const TensorField& A) {
  if (!A.vector_valued()) throw std::invalid_argument("compose_value: vector-valued field expected");
  TensorField out = A;
  const int n = A.dim();
  const int args = A.args_count();
  for (Index p = 0; p < A.points(); ++p) {
    Mat He = H.endo(p);
    for (int f = 0; f < args; ++f) out.value(p, f) = He * Vec(A.value(p, f));
  }
  return out;
}

TensorField insert_vector(const TensorField& v, const TensorField& A, int slot) {
  if (A.order() < 1) throw std::invalid_argument("insert_vector: field has no argument slots");
  const int n = A.dim();
  const int q = A.order() - 1;
  TensorField out = A.vector_valued() ? TensorField::vector_valued(A.grid(), q)
                                      : TensorField::covariant(A.grid(), q);
  const int vals = A.vector_valued() ? n : 1;
  std::array<int, 6> I{};
  do {
    for (Index p = 0; p < A.points(); ++p) {
      auto vv = v.value(p);
      for (int a = 0; a < vals; ++a) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += vv[k] * A.at(p, inserted(I, q, slot, k), a);
        out.at(p, I, a) = acc;
      }
    }
  } while (advance_multi(n, q, I) && q > 0);
  return out;
}

TensorField trace_slots_g(const TensorField& ginv, const TensorField& A, int s1, int s2) {
  if (A.order() < 2) throw std::invalid_argument("trace_slots_g: need two slots");
  if (s1 > s2) std::swap(s1, s2);
  const int n = A.dim();
  const int q = A.order() - 2;
  TensorField out = A.vector_valued() ? TensorField::vector_valued(A.grid(), q)
                                      : TensorField::covariant(A.grid(), q);
  const int vals = A.vector_valued() ? n : 1;
  std::array<int, 6> I{};
  do {
    for (Index p = 0; p < A.points(); ++p) {
      auto Gi = ginv.mat2(p);
      for (int a = 0; a < vals; ++a) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            auto full = inserted(inserted(I, q, s1, k), q + 1, s2, l);
            acc += Gi(k, l) * A.at(p, full, a);
          }
        out.at(p, I, a) = acc;
      }
    }
  } while (advance_multi(n, q, I) && q > 0);
  return out;
}

TensorField trace_value_slot(const TensorField& A, int slot) {
  if (!A.vector_valued() || A.order() < 1)
    throw std::invalid_argument("trace_value_slot: vector-valued field expected");
  const int n = A.dim();
  const int q = A.order() - 1;
  TensorField out = TensorField::covariant(A.grid(), q);
  std::array<int, 6> I{};
  do {
    for (Index p = 0; p < A.points(); ++p) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += A.at(p, inserted(I, q, slot, k), k);
      out.at(p, I) = acc;
    }
  } while (advance_multi(n, q, I) && q > 0);
  return out;
}

TensorField bracket_last(const TensorField& A, const TensorField& H) {
  if (!A.vector_valued() || A.order() < 1)
    throw std::invalid_argument("bracket_last: vector-valued field expected");
  TensorField out = A;
  const int outer = A.outer_count();
  for (Index p = 0; p < A.points(); ++p) {
    Mat He = H.endo(p);
    for (int o = 0; o < outer; ++o) {
      Mat Ae = A.endo(p, o);
      out.endo(p, o) = Ae * He - He * Ae;
    }
  }
  return out;
}

TensorField star_form(const TensorField& ginv, const TensorField& B, const TensorField& A) {
  require_vv(B, 3, "star_form");
  require_vv(A, 2, "star_form");
  const int n = A.dim();
  TensorField out = TensorField::vector_valued(A.grid(), 2);
  for (Index p = 0; p < A.points(); ++p) {
    Mat Gi = ginv.mat2(p);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        Vec acc = Vec::Zero(n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            acc += Gi(k, l) * (Mat(B.endo(p, u * n + k)) * Vec(A.value(p, l * n + v)));
        out.value(p, u * n + v) = acc;
      }
  }
  return out;
}

TensorField star_circle(const TensorField& ginv, const TensorField& B, const TensorField& A) {
  require_vv(B, 3, "star_circle");
  require_vv(A, 2, "star_circle");
  const int n = A.dim();
  TensorField out = TensorField::vector_valued(A.grid(), 2);
  for (Index p = 0; p < A.points(); ++p) {
    Mat Gi = ginv.mat2(p);
    for (int u = 0; u < n; ++u) {
      Mat acc = Mat::Zero(n, n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Mat Buk = B.endo(p, u * n + k);
          Mat Al = A.endo(p, l);
          acc += Gi(k, l) * (Buk * Al - Al * Buk);
        }
      out.endo(p, u) = acc;
    }
  }
  return out;
}

TensorField star_argvalue(const TensorField& ginv, const TensorField& A, const TensorField& B) {
  require_vv(A, 2, "star_argvalue");
  require_vv(B, 3, "star_argvalue");
  const int n = A.dim();
  TensorField out = TensorField::vector_valued(A.grid(), 2);
  for (Index p = 0; p < A.points(); ++p) {
    Mat Gi = ginv.mat2(p);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        Mat Buv = B.endo(p, u * n + v);
        Vec acc = Vec::Zero(n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
              acc += Gi(k, l) * Buv(m, l) * Vec(A.value(p, k * n + m));
        out.value(p, u * n + v) = acc;
      }
  }
  return out;
}

TensorField star_endo(const TensorField& ginv, const TensorField& R, const TensorField& H) {
  require_vv(R, 3, "star_endo");
  const int n = R.dim();
  TensorField out = TensorField::vector_valued(R.grid(), 1);
  for (Index p = 0; p < R.points(); ++p) {
    Mat Gi = ginv.mat2(p);
    Mat He = H.endo(p);
    Mat acc = Mat::Zero(n, n);
    for (int xi = 0; xi < n; ++xi) {
      Vec col = Vec::Zero(n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) col += Gi(k, l) * (Mat(R.endo(p, xi * n + k)) * He.col(l));
      acc.col(xi) = col;
    }
    out.endo(p) = acc;
  }
  return out;
}

TensorField bullet_k(const TensorField& A, const TensorField& B, int k) {
  if (!A.vector_valued()) throw std::invalid_argument("bullet_k: A must be vector-valued");
  const int qa = A.order();
  const int qb = B.order();
  if (k < 1 || k > qb) throw std::invalid_argument("bullet_k: k out of range");
  const int n = A.dim();
  const int q_out = (qa - 1) + qb;
  TensorField out = B.vector_valued() ? TensorField::vector_valued(A.grid(), q_out)
                                      : TensorField::covariant(A.grid(), q_out);
  const int vals = B.vector_valued() ? n : 1;
  std::array<int, 6> I{};
  do {
    // I = (u_1..u_{qa-1}, v_1..v_qb)
    for (Index p = 0; p < A.points(); ++p) {
      for (int a = 0; a < vals; ++a) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
          std::array<int, 6> ia{};
          for (int s = 0; s < qa - 1; ++s) ia[s] = I[s];
          ia[qa - 1] = I[(qa - 1) + (k - 1)];  // A's last argument takes v_k
          std::array<int, 6> ib{};
          for (int s = 0; s < qb; ++s) ib[s] = I[(qa - 1) + s];
          ib[k - 1] = m;
          acc += A.at(p, ia, m) * B.at(p, ib, a);
        }
        out.at(p, I, a) = acc;
      }
    }
  } while (advance_multi(n, q_out, I));
  return out;
}

TensorField hat_neg(const TensorField& A, const TensorField& B) {
  const int qb = B.order();
  if (qb < 2) {
    int q_out = (A.order() - 1) + qb;
    TensorField out = B.vector_valued() ? TensorField::vector_valued(A.grid(), q_out)
                                        : TensorField::covariant(A.grid(), q_out);
    return out;  // empty sum
  }
  TensorField acc = bullet_k(A, B, 1);
  for (int k = 2; k <= qb - 1; ++k) acc += bullet_k(A, B, k);
  return acc;
}

TensorField odot_g(const TensorField& ginv, const TensorField& A, const TensorField& B, int k,
                   int l) {
  if (!A.vector_valued() || !B.vector_valued())
    throw std::invalid_argument("odot_g: vector-valued fields expected");
  const int pa = A.order();  // arguments of A: (u_1..u_{pa-2}, ., v_k)
  const int qb = B.order();
  if (!(1 <= l && l <= k && k <= qb - 2)) throw std::invalid_argument("odot_g: bad (k,l)");
  const int n = A.dim();
  const int q_out = (pa - 2) + (qb - 1);
  TensorField out = TensorField::vector_valued(A.grid(), q_out);
  std::array<int, 6> I{};
  do {
    // I = (u_1..u_{pa-2}, v_1..v_{qb-1})
    for (Index p = 0; p < A.points(); ++p) {
      for (int a = 0; a < n; ++a) {
        double acc = 0.0;
        for (int ta = 0; ta < n; ++ta)
          for (int tb = 0; tb < n; ++tb) {
            double gi = ginv.mat2(p)(ta, tb);
            if (gi == 0.0) continue;
            std::array<int, 6> ia{};
            for (int s = 0; s < pa - 2; ++s) ia[s] = I[s];
            ia[pa - 2] = tb;
            ia[pa - 1] = I[(pa - 2) + (k - 1)];  // v_k
            for (int m = 0; m < n; ++m) {
              double av = A.at(p, ia, m);
              if (av == 0.0) continue;
              // B args: v_1..v_{l-1}, ta, v_l..v_{k-1}, m, v_{k+1}..v_{qb-1}
              std::array<int, 6> ib{};
              int s = 0;
              for (int j = 1; j <= l - 1; ++j) ib[s++] = I[(pa - 2) + (j - 1)];
              ib[s++] = ta;
              for (int j = l; j <= k - 1; ++j) ib[s++] = I[(pa - 2) + (j - 1)];
              ib[s++] = m;
              for (int j = k + 1; j <= qb - 1; ++j) ib[s++] = I[(pa - 2) + (j - 1)];
              acc += gi * av * B.at(p, ib, a);
            }
          }
        out.at(p, I, a) = acc;
      }
    }
  } while (advance_multi(n, q_out, I));
  return out;
}

TensorField hat_neg_g(const TensorField& ginv, const TensorField& A, const TensorField& B) {
  const int qb = B.order();
  const int q_out = (A.order() - 2) + (qb - 1);
  if (qb < 3) return TensorField::vector_valued(A.grid(), q_out);  // empty sum
  TensorField acc = odot_g(ginv, A, B, 1, 1);
  for (int k = 2; k <= qb - 2; ++k) acc += odot_g(ginv, A, B, k, 1);
  return acc;
}

TensorField lower_value_last(const TensorField& g, const TensorField& A) {
  if (!A.vector_valued()) throw std::invalid_argument("lower_value_last: vector-valued expected");
  const int n = A.dim();
  const int q = A.order();
  TensorField out = TensorField::covariant(A.grid(), q + 1);
  std::array<int, 6> I{};
  do {
    for (Index p = 0; p < A.points(); ++p) {
      auto G = g.mat2(p);
      for (int m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += G(a, m) * A.at(p, I, a);
        auto full = I;
        full[q] = m;
        out.at(p, full) = acc;
      }
    }
  } while (advance_multi(n, q, I));
  return out;
}

}  // namespace solflow
