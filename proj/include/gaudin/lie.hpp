#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gaudin/field.hpp"
#include "gaudin/linalg.hpp"
#include "gaudin/sparse.hpp"

namespace gaudin {

/// Coefficients of a Lie algebra element in the algebra's basis.
using AlgebraElement = std::vector<Rational>;
using QQ = GaussianRational;

enum class FormNormalization { trace, killing };

/// One term coeff * x_a (x) x_b of the Casimir tensor.
struct CasimirTerm {
  std::size_t a, b;
  Rational coeff;
};

/// sl_n realized through its defining n x n matrices. The bilinear form is
/// form_scale * tr(xy); the Casimir tensor is sum_a x_a (x) x^a with x^a the
/// B-dual basis, so every entry stays rational.
struct LieAlgebraData {
  std::string name;
  int n = 0;  // size of defining matrices
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> defining;  // row-major n*n per basis element
  std::vector<Rational> structure;               // [x_a, x_b] = sum_d c[(a*dim+b)*dim+d] x_d
  std::vector<Rational> form;                    // B(x_a, x_b)
  std::vector<Rational> form_inverse;
  Rational form_scale{1};
  FormNormalization normalization = FormNormalization::trace;
  std::vector<CasimirTerm> casimir;
  std::vector<std::size_t> cartan;          // basis indices spanning the diagonal Cartan
  std::vector<AlgebraElement> simple_raising;
  AlgebraElement principal_e, principal_f, principal_h;
  std::vector<int> exponents;

  std::size_t dim() const { return labels.size(); }
  int rank() const { return n - 1; }

  const Rational& c(std::size_t a, std::size_t b, std::size_t d) const {
    return structure[(a * dim() + b) * dim() + d];
  }
  const Rational& B(std::size_t a, std::size_t b) const { return form[a * dim() + b]; }

  AlgebraElement zero() const { return AlgebraElement(dim(), Rational(0)); }

  AlgebraElement basis(std::size_t a) const {
    auto x = zero();
    x[a] = 1;
    return x;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t a = 0; a < dim(); ++a)
      if (labels[a] == label) return a;
    throw Error("unknown basis label '" + label + "' for " + name);
  }

  AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) const {
    auto out = zero();
    for (std::size_t a = 0; a < dim(); ++a) {
      if (sgn(x[a]) == 0) continue;
      for (std::size_t b = 0; b < dim(); ++b) {
        if (sgn(y[b]) == 0) continue;
        for (std::size_t d = 0; d < dim(); ++d)
          if (sgn(c(a, b, d)) != 0) out[d] += x[a] * y[b] * c(a, b, d);
      }
    }
    return out;
  }

  Rational pairing(const AlgebraElement& x, const AlgebraElement& y) const {
    Rational s = 0;
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b)
        if (sgn(x[a]) != 0 && sgn(y[b]) != 0) s += x[a] * y[b] * B(a, b);
    return s;
  }

  /// Element whose defining matrix is the transpose of x's (the compact-form
  /// adjoint for real coefficients).
  AlgebraElement star(const AlgebraElement& x) const {
    std::vector<Rational> m(static_cast<std::size_t>(n * n), Rational(0));
    for (std::size_t a = 0; a < dim(); ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(j * n + i)] += x[a] * defining[a][static_cast<std::size_t>(i * n + j)];
    return decompose(m);
  }

  /// Coordinates of a traceless n x n matrix: c = B^{-1} (B(x_b, X))_b.
  AlgebraElement decompose(const std::vector<Rational>& m) const {
    std::vector<Rational> beta(dim(), Rational(0));
    for (std::size_t b = 0; b < dim(); ++b) beta[b] = form_scale * trace_product(defining[b], m);
    auto x = zero();
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b) x[a] += form_inverse[a * dim() + b] * beta[b];
    return x;
  }

  std::vector<Rational> matrix_of(const AlgebraElement& x) const {
    std::vector<Rational> m(static_cast<std::size_t>(n * n), Rational(0));
    for (std::size_t a = 0; a < dim(); ++a)
      if (sgn(x[a]) != 0)
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += x[a] * defining[a][k];
    return m;
  }

  Rational trace_product(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
    Rational t = 0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const auto& xv = x[static_cast<std::size_t>(i * n + k)];
        const auto& yv = y[static_cast<std::size_t>(k * n + i)];
        if (sgn(xv) != 0 && sgn(yv) != 0) t += xv * yv;
      }
    return t;
  }

  /// Jacobi identity on every basis triple, exactly.
  bool jacobi_holds() const {
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b)
        for (std::size_t d = 0; d < dim(); ++d) {
          auto x = basis(a), y = basis(b), z = basis(d);
          auto s = bracket(x, bracket(y, z));
          auto t = bracket(y, bracket(z, x));
          auto u = bracket(z, bracket(x, y));
          for (std::size_t k = 0; k < dim(); ++k)
            if (s[k] + t[k] + u[k] != 0) return false;
        }
    return true;
  }

  /// B([x,y],z) + B(y,[x,z]) = 0 on every basis triple, exactly.
  bool form_invariant() const {
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b)
        for (std::size_t d = 0; d < dim(); ++d) {
          auto x = basis(a), y = basis(b), z = basis(d);
          if (pairing(bracket(x, y), z) + pairing(y, bracket(x, z)) != 0) return false;
        }
    return true;
  }

  /// Killing form tr(ad x_a ad x_b), computed from the structure constants.
  std::vector<Rational> killing_form() const {
    std::vector<Rational> k(dim() * dim(), Rational(0));
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b) {
        Rational s = 0;
        for (std::size_t p = 0; p < dim(); ++p)
          for (std::size_t q = 0; q < dim(); ++q)
            if (sgn(c(a, q, p)) != 0 && sgn(c(b, p, q)) != 0) s += c(a, q, p) * c(b, p, q);
        k[a * dim() + b] = s;
      }
    return k;
  }

  /// Ratio Killing / trace form (2n for sl_n).
  Rational killing_to_trace_ratio() const {
    auto k = killing_form();
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b) {
        Rational tr = trace_product(defining[a], defining[b]);
        if (sgn(tr) != 0) return Rational(k[a * dim() + b] / tr);
      }
    throw Error("degenerate trace form");
  }
};

using Algebra = std::shared_ptr<const LieAlgebraData>;

namespace detail {

inline std::vector<Rational> unit_matrix(int n, int i, int j) {
  std::vector<Rational> m(static_cast<std::size_t>(n * n), Rational(0));
  m[static_cast<std::size_t>(i * n + j)] = 1;
  return m;
}

inline std::vector<Rational> matmul(const std::vector<Rational>& x, const std::vector<Rational>& y, int n) {
  std::vector<Rational> m(static_cast<std::size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const auto& xv = x[static_cast<std::size_t>(i * n + k)];
      if (sgn(xv) == 0) continue;
      for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i * n + j)] += xv * y[static_cast<std::size_t>(k * n + j)];
    }
  return m;
}

inline int parse_rank_name(const std::string& name) {
  if (name == "sl2") return 2;
  std::string digits;
  if (name.rfind("sln(", 0) == 0 && name.back() == ')')
    digits = name.substr(4, name.size() - 5);
  else if (name.rfind("sl(", 0) == 0 && name.back() == ')')
    digits = name.substr(3, name.size() - 4);
  else if (name.rfind("sl", 0) == 0)
    digits = name.substr(2);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw Error("unsupported Lie algebra '" + name + "' (expected sl2 or sln(n))");
  int n = std::stoi(digits);
  if (n < 2) throw Error("unsupported Lie algebra '" + name + "' (need n >= 2)");
  return n;
}

}  // namespace detail

/// Builds the algebra from an explicit basis of traceless matrices. Everything
/// (structure constants, form, dual basis, Casimir) is derived from the matrices.
inline Algebra algebra_from_matrices(std::string name, int n, std::vector<std::string> labels,
                                     std::vector<std::vector<Rational>> mats,
                                     FormNormalization normalization = FormNormalization::trace) {
  auto alg = std::make_shared<LieAlgebraData>();
  alg->name = std::move(name);
  alg->n = n;
  alg->labels = std::move(labels);
  alg->defining = std::move(mats);
  alg->normalization = normalization;
  const std::size_t d = alg->dim();
  if (d != static_cast<std::size_t>(n * n - 1)) throw Error("basis size does not match sl_n dimension");

  // trace form first; rescaled below once the Killing ratio is known
  alg->form.assign(d * d, Rational(0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) alg->form[a * d + b] = alg->trace_product(alg->defining[a], alg->defining[b]);
  alg->form_scale = 1;

  auto invert = [&](const std::vector<Rational>& f) {
    Dense<QQ> aug(d, 2 * d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) aug(a, b) = QQ(f[a * d + b]);
      aug(a, d + a) = QQ(1L);
    }
    auto ech = rref(aug);
    if (ech.pivots.size() != d || ech.pivots.back() != d - 1) throw Error("degenerate invariant form");
    std::vector<Rational> inv(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) inv[a * d + b] = ech.reduced(a, d + b).real();
    return inv;
  };
  alg->form_inverse = invert(alg->form);

  alg->structure.assign(d * d * d, Rational(0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      auto xy = detail::matmul(alg->defining[a], alg->defining[b], n);
      auto yx = detail::matmul(alg->defining[b], alg->defining[a], n);
      for (std::size_t k = 0; k < xy.size(); ++k) xy[k] -= yx[k];
      auto coords = alg->decompose(xy);
      for (std::size_t k = 0; k < d; ++k) alg->structure[(a * d + b) * d + k] = coords[k];
    }

  if (normalization == FormNormalization::killing) {
    alg->form_scale = alg->killing_to_trace_ratio();
    for (auto& v : alg->form) v *= alg->form_scale;
    alg->form_inverse = invert(alg->form);
  }

  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      if (sgn(alg->form_inverse[a * d + b]) != 0) alg->casimir.push_back({a, b, alg->form_inverse[a * d + b]});

  for (std::size_t a = 0; a < d; ++a) {
    bool diagonal = true;
    for (int i = 0; i < n && diagonal; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && sgn(alg->defining[a][static_cast<std::size_t>(i * n + j)]) != 0) diagonal = false;
    if (diagonal) alg->cartan.push_back(a);
  }

  std::vector<Rational> e(static_cast<std::size_t>(n * n), Rational(0)), f = e, h = e;
  for (int i = 0; i + 1 < n; ++i) {
    alg->simple_raising.push_back(alg->decompose(detail::unit_matrix(n, i, i + 1)));
    e[static_cast<std::size_t>(i * n + i + 1)] = (i + 1) * (n - i - 1);
    f[static_cast<std::size_t>((i + 1) * n + i)] = 1;
  }
  for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i * n + i)] = n - 1 - 2 * i;
  alg->principal_e = alg->decompose(e);
  alg->principal_f = alg->decompose(f);
  alg->principal_h = alg->decompose(h);
  for (int j = 1; j < n; ++j) alg->exponents.push_back(j);
  return alg;
}

/// sl2 (basis e, f, h) or sl_n (basis E_ij for i != j, then H_k = E_kk - E_k+1,k+1).
inline Algebra build_algebra(const std::string& name, FormNormalization normalization = FormNormalization::trace) {
  int n = detail::parse_rank_name(name);
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> mats;
  if (n == 2) {
    labels = {"e", "f", "h"};
    auto h = detail::unit_matrix(2, 0, 0);
    h[3] = -1;
    mats = {detail::unit_matrix(2, 0, 1), detail::unit_matrix(2, 1, 0), h};
    return algebra_from_matrices("sl2", 2, labels, mats, normalization);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
        mats.push_back(detail::unit_matrix(n, i, j));
      }
  for (int k = 0; k + 1 < n; ++k) {
    labels.push_back("H" + std::to_string(k + 1));
    auto m = detail::unit_matrix(n, k, k);
    m[static_cast<std::size_t>((k + 1) * n + k + 1)] = -1;
    mats.push_back(m);
  }
  return algebra_from_matrices("sln(" + std::to_string(n) + ")", n, labels, mats, normalization);
}

/// Matrices of the Casimir tensor sum coeff x_a (x) x_b as an n^2 x n^2
/// Kronecker matrix; basis-independent by construction.
inline std::vector<Rational> casimir_tensor_matrix(const LieAlgebraData& alg) {
  const int n = alg.n, nn = n * n;
  std::vector<Rational> out(static_cast<std::size_t>(nn * nn), Rational(0));
  for (const auto& t : alg.casimir)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const auto& x = alg.defining[t.a][static_cast<std::size_t>(i * n + j)];
            const auto& y = alg.defining[t.b][static_cast<std::size_t>(k * n + l)];
            if (sgn(x) != 0 && sgn(y) != 0)
              out[static_cast<std::size_t>((i * n + k) * nn + (j * n + l))] += t.coeff * x * y;
          }
  return out;
}

/// Finite-dimensional module: action matrix per basis element plus a diagonal
/// positive Gram form making the compact-form adjoint x* act as the adjoint.
struct Module {
  std::string label;
  int highest_weight = -1;  // sl2 highest weight; -1 for the sl_n defining module
  std::size_t dim = 0;
  std::vector<SparseMatrix<QQ>> action;
  std::vector<Rational> gram;
};

/// Irreducible sl2 module on the weight basis v_0..v_lambda:
/// f v_k = v_{k+1}, e v_k = k(lambda-k+1) v_{k-1}, h v_k = (lambda-2k) v_k.
struct IrrepSl2 {
  int highest_weight = 0;
  std::size_t dim = 1;
  SparseMatrix<QQ> e, f, h;
};

inline IrrepSl2 irrep_sl2(int lambda) {
  if (lambda < 0) throw Error("sl2 highest weight must be nonnegative, got " + std::to_string(lambda));
  IrrepSl2 v;
  v.highest_weight = lambda;
  v.dim = static_cast<std::size_t>(lambda) + 1;
  v.e = v.f = v.h = SparseMatrix<QQ>(v.dim, v.dim);
  for (int k = 0; k <= lambda; ++k) {
    auto uk = static_cast<std::size_t>(k);
    v.h.add(uk, uk, QQ(static_cast<long>(lambda - 2 * k)));
    if (k < lambda) v.f.add(uk + 1, uk, QQ(1L));
    if (k > 0) v.e.add(uk - 1, uk, QQ(static_cast<long>(k * (lambda - k + 1))));
  }
  return v;
}

/// Shapovalov-type norms <v_k, v_k> = k! lambda! / (lambda-k)!, for which e* = f.
inline std::vector<Rational> sl2_gram(int lambda) {
  std::vector<Rational> g(static_cast<std::size_t>(lambda) + 1);
  g[0] = 1;
  for (int k = 1; k <= lambda; ++k) g[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k - 1)] * k * (lambda - k + 1);
  return g;
}

inline Module sl2_module(const LieAlgebraData& alg, int lambda) {
  if (alg.n != 2) throw Error("sl2 modules require sl2, got " + alg.name);
  auto v = irrep_sl2(lambda);
  Module m;
  m.label = "V" + std::to_string(lambda);
  m.highest_weight = lambda;
  m.dim = v.dim;
  for (std::size_t a = 0; a < alg.dim(); ++a) {
    const auto& x = alg.defining[a];  // [[x00, x01], [x10, -x00]]
    SparseMatrix<QQ> op = v.e * QQ(x[1]);
    op += v.f * QQ(x[2]);
    op += v.h * QQ(x[0]);
    m.action.push_back(std::move(op));
  }
  m.gram = sl2_gram(lambda);
  return m;
}

inline Module defining_module(const LieAlgebraData& alg) {
  Module m;
  m.label = "C" + std::to_string(alg.n);
  m.dim = static_cast<std::size_t>(alg.n);
  for (std::size_t a = 0; a < alg.dim(); ++a) {
    SparseMatrix<QQ> op(m.dim, m.dim);
    for (int i = 0; i < alg.n; ++i)
      for (int j = 0; j < alg.n; ++j)
        op.add(static_cast<std::size_t>(i), static_cast<std::size_t>(j), QQ(alg.defining[a][static_cast<std::size_t>(i * alg.n + j)]));
    m.action.push_back(std::move(op));
  }
  m.gram.assign(m.dim, Rational(1));
  return m;
}

/// Matrix of sum_a x_a x^a on a module.
inline SparseMatrix<QQ> casimir_on(const LieAlgebraData& alg, const Module& m) {
  SparseMatrix<QQ> c(m.dim, m.dim);
  for (const auto& t : alg.casimir) c.axpy(QQ(t.coeff), m.action[t.a] * m.action[t.b]);
  return c;
}

/// The scalar by which the Casimir acts on an irreducible module.
inline Rational casimir_scalar(const LieAlgebraData& alg, const Module& m) {
  auto c = casimir_on(alg, m);
  QQ s = c.at(0, 0);
  if (!(c == SparseMatrix<QQ>::identity(m.dim) * s)) throw Error("Casimir is not scalar on " + m.label);
  return s.real();
}

}  // namespace gaudin
