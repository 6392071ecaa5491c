#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gaudin/element.hpp"
#include "gaudin/lie.hpp"
#include "gaudin/linalg.hpp"
#include "gaudin/tensor_space.hpp"

namespace gaudin {

/// Marked points z_1..z_N and the twist mu (an algebra element; mu(x) = B(mu, x)).
template <Field S>
struct GaudinParams {
  Algebra alg;
  std::vector<S> z;
  AlgebraElement mu;

  GaudinParams(Algebra a, std::vector<S> points, AlgebraElement twist = {})
      : alg(std::move(a)), z(std::move(points)), mu(std::move(twist)) {
    if (mu.empty()) mu = alg->zero();
    if (mu.size() != alg->dim()) throw Error("mu has the wrong number of coordinates");
    if (z.empty()) throw Error("need at least one marked point");
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t k = 0; k < i; ++k)
        if (coincide(z[i], z[k]))
          throw Error("coincident points z" + std::to_string(k + 1) + " = z" + std::to_string(i + 1) + " = " +
                      to_string(z[i]));
  }

  std::size_t N() const { return z.size(); }
  bool homogeneous() const {
    return std::all_of(mu.begin(), mu.end(), [](const Rational& c) { return sgn(c) == 0; });
  }

  static bool coincide(const S& a, const S& b) {
    if constexpr (is_exact_v<S>)
      return a == b;
    else
      return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  }
};

/// sum_{k != i} Omega_ik / (z_i - z_k), the homogeneous part (mu is ignored).
template <Field S>
Element<S> hamiltonian_element(const GaudinParams<S>& p, std::size_t i) {
  const std::size_t n = p.N();
  if (i < 1 || i > n) throw Error("point index out of range");
  Element<S> h(n);
  for (std::size_t k = 1; k <= n; ++k)
    if (k != i) h += Element<S>::omega(n, *p.alg, i, k) * (scalar_from<S>(1L) / (p.z[i - 1] - p.z[k - 1]));
  return h;
}

/// H_i + mu^{(i)}.
template <Field S>
Element<S> inhomogeneous_hamiltonian_element(const GaudinParams<S>& p, std::size_t i) {
  return hamiltonian_element(p, i) + Element<S>::embed(p.N(), p.mu, i);
}

template <Field S>
SparseMatrix<S> quadratic_hamiltonian(std::size_t i, const GaudinParams<S>& p, const TensorSpace& t) {
  return hamiltonian_element(p, i).evaluate(t);
}

template <Field S>
SparseMatrix<S> inhomogeneous_hamiltonian(std::size_t i, const GaudinParams<S>& p, const TensorSpace& t) {
  return inhomogeneous_hamiltonian_element(p, i).evaluate(t);
}

template <Field S>
Element<S> diagonal_casimir_element(std::size_t n, const LieAlgebraData& alg) {
  Element<S> c(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t k = 1; k <= n; ++k) c += Element<S>::omega(n, alg, i, k);
  return c;
}

/// Partial-fraction data of
///   S(w) = sum_ab coeff_ab (mu(x_a) + sum_i x_a^{(i)}/(w-z_i)) (mu(x_b) + sum_k x_b^{(k)}/(w-z_k))
///        = constant + sum_i S^{i,2}/(w-z_i)^2 + S^{i,1}/(w-z_i).
/// With this pairing S^{i,2} = C^{(i)} and S^{i,1} = normalization * H_i^mu.
template <Field S>
struct QuadraticGenFn {
  static constexpr long normalization = 2;
  std::vector<S> z;
  std::vector<Element<S>> pole2, pole1;
  S constant{};  // B(mu, mu)
  std::size_t num_factors = 0;

  /// Coefficient of w^{-m} in the expansion at infinity.
  Element<S> infinity(std::size_t m) const {
    if (m == 0) return Element<S>::scalar(num_factors, constant);
    Element<S> out(num_factors);
    for (std::size_t i = 0; i < z.size(); ++i) {
      out += pole1[i] * power(z[i], m - 1);
      if (m >= 2) out += pole2[i] * (scalar_from<S>(static_cast<long>(m - 1)) * power(z[i], m - 2));
    }
    return out;
  }

  /// Value at a regular w reconstructed from the partial fractions.
  Element<S> at(const S& w) const {
    Element<S> out = Element<S>::scalar(num_factors, constant);
    for (std::size_t i = 0; i < z.size(); ++i) {
      S r = scalar_from<S>(1L) / (w - z[i]);
      out += pole2[i] * (r * r);
      out += pole1[i] * r;
    }
    return out;
  }

  static S power(const S& x, std::size_t k) {
    S r = scalar_from<S>(1L);
    for (std::size_t j = 0; j < k; ++j) r *= x;
    return r;
  }
};

template <Field S>
QuadraticGenFn<S> generating_function(const GaudinParams<S>& p) {
  QuadraticGenFn<S> g;
  g.z = p.z;
  g.num_factors = p.N();
  const S two = scalar_from<S>(QuadraticGenFn<S>::normalization);
  for (std::size_t i = 1; i <= p.N(); ++i) {
    g.pole2.push_back(Element<S>::omega(p.N(), *p.alg, i, i));
    g.pole1.push_back(inhomogeneous_hamiltonian_element(p, i) * two);
  }
  g.constant = scalar_from<S>(p.alg->pairing(p.mu, p.mu));
  return g;
}

/// S(w) straight from its defining product, for cross-checking the partial fractions.
template <Field S>
Element<S> generating_function_direct(const GaudinParams<S>& p, const S& w) {
  const std::size_t n = p.N();
  const auto& alg = *p.alg;
  std::vector<Element<S>> factor;
  for (std::size_t a = 0; a < alg.dim(); ++a) {
    Element<S> f = Element<S>::scalar(n, scalar_from<S>(alg.pairing(p.mu, alg.basis(a))));
    for (std::size_t i = 1; i <= n; ++i) {
      if (GaudinParams<S>::coincide(w, p.z[i - 1])) throw Error("w coincides with a marked point");
      f += Element<S>::letter(n, i, a) * (scalar_from<S>(1L) / (w - p.z[i - 1]));
    }
    factor.push_back(std::move(f));
  }
  Element<S> out(n);
  for (const auto& t : alg.casimir) out += factor[t.a] * factor[t.b] * scalar_from<S>(t.coeff);
  return out;
}

/// Images of the generators, with provenance labels.
template <Field S>
struct GeneratorSet {
  std::vector<std::string> labels;
  std::vector<Element<S>> elements;  // empty when assembled from matrices only
  std::vector<SparseMatrix<S>> ops;
  bool complete = false;  // generates the whole algebra image (sl2 only)

  std::size_t size() const { return ops.size(); }

  void push(std::string label, Element<S> e, SparseMatrix<S> op) {
    labels.push_back(std::move(label));
    elements.push_back(std::move(e));
    ops.push_back(std::move(op));
  }

  /// Largest relative commutator norm over all pairs (exactly 0 over exact fields when commuting).
  double max_commutator() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < ops.size(); ++a)
      for (std::size_t b = a + 1; b < ops.size(); ++b) {
        double scale = std::max(ops[a].frobenius_norm() * ops[b].frobenius_norm(), 1e-300);
        worst = std::max(worst, commutator(ops[a], ops[b]).frobenius_norm() / scale);
      }
    return worst;
  }

  bool commutative(double rel_tol = 1e-10) const {
    for (std::size_t a = 0; a < ops.size(); ++a)
      for (std::size_t b = a + 1; b < ops.size(); ++b)
        if (!commutes(ops[a], ops[b], rel_tol)) return false;
    return true;
  }

  GeneratorSet restricted(const Subspace<S>& sub) const {
    GeneratorSet out;
    out.labels = labels;
    out.elements = elements;
    out.complete = complete;
    for (const auto& op : ops) out.ops.push_back(restrict_to(op, sub));
    return out;
  }
};

/// {S^{i,1}, S^{i,2}} for all i, plus the infinity coefficients S^{inf,1},
/// S^{inf,2}. For mu = 0 these reduce to 0 and the diagonal Casimir; for
/// mu != 0 the diagonal Casimir does not commute with mu^{(i)} and is left out.
template <Field S>
GeneratorSet<S> generator_set(const GaudinParams<S>& p, const TensorSpace& t, bool full = true) {
  if (full && p.alg->n != 2)
    throw Error("full generator set is only available for sl2 (requested for " + p.alg->name + ")");
  if (t.num_factors() != p.N()) throw Error("tensor space and parameters differ in number of points");
  auto g = generating_function(p);
  GeneratorSet<S> out;
  out.complete = full;
  for (std::size_t i = 1; i <= p.N(); ++i) {
    out.push("S^{" + std::to_string(i) + ",1}", g.pole1[i - 1], g.pole1[i - 1].evaluate(t));
    out.push("S^{" + std::to_string(i) + ",2}", g.pole2[i - 1], g.pole2[i - 1].evaluate(t));
  }
  if (p.homogeneous()) {
    // S^{inf,1} vanishes and S^{inf,2} is the diagonal Casimir
    auto c = diagonal_casimir_element<S>(p.N(), *p.alg);
    out.push("diag-casimir", c, c.evaluate(t));
  } else {
    for (std::size_t m = 1; m <= 2; ++m) {
      auto e = g.infinity(m);
      out.push("S^{inf," + std::to_string(m) + "}", e, e.evaluate(t));
    }
  }
  return out;
}

template <Field S>
GeneratorSet<S> generator_set(const GaudinParams<S>& p, const TensorSpace& t, const Subspace<S>& restrict,
                              bool full = true) {
  return generator_set(p, t, full).restricted(restrict);
}

/// Decomposition of an operator into ad(diag h)-eigencomponents, h principal;
/// eigenvalue 2k is degree k.
struct FiltrationDegree {
  int min_degree = 0, max_degree = 0;
  SparseMatrix<QQ> leading;  // top-degree component
  std::map<int, SparseMatrix<QQ>> components;
};

inline FiltrationDegree filtration_degree(const SparseMatrix<QQ>& op, const TensorSpace& t) {
  FiltrationDegree out;
  for (std::size_t r = 0; r < op.rows(); ++r)
    for (const auto& [c, v] : op.row(r)) {
      Rational diff = t.principal_weight(r) - t.principal_weight(c);
      if (diff.get_den() != 1 || diff.get_num().get_si() % 2 != 0)
        throw Error("operator is not a sum of ad(diag h)-eigencomponents of even eigenvalue");
      int k = static_cast<int>(diff.get_num().get_si() / 2);
      auto [it, inserted] = out.components.try_emplace(k, op.rows(), op.cols());
      it->second.add(r, c, v);
    }
  if (out.components.empty()) {
    out.leading = SparseMatrix<QQ>(op.rows(), op.cols());
    return out;
  }
  out.min_degree = out.components.begin()->first;
  out.max_degree = out.components.rbegin()->first;
  out.leading = out.components.rbegin()->second;
  return out;
}

}  // namespace gaudin
