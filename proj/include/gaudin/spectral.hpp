#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gaudin/gaudin.hpp"
#include "gaudin/linalg.hpp"
#include "gaudin/sparse.hpp"

namespace gaudin {

struct SpectralTolerances {
  double residual = 1e-10;
  double gap = 1e-8;          // eigenvalue tuples closer than this are not "distinct"
  double split = 1e-12;       // relative; eigenvalues closer than this share a block
  double hermitian = 1e-10;
  double commutator = 1e-10;
};

/// Span grown from a seed vector by applying the generators until it stops
/// growing. Exact elimination over exact fields; Gram-Schmidt with a relative
/// acceptance threshold otherwise.
template <Field S>
struct Closure {
  std::vector<std::vector<S>> basis;
  std::size_t dim() const { return basis.size(); }
};

namespace detail {

template <Field S>
class IncrementalBasis {
 public:
  explicit IncrementalBasis(double tol) : tol_(tol) {}

  /// Adds v if it is independent of the current span; returns whether it was added.
  bool add(std::vector<S> v) {
    if constexpr (is_exact_v<S>) {
      for (std::size_t k = 0; k < rows_.size(); ++k) {
        const S& c = v[pivots_[k]];
        if (scalar_is_zero(c)) continue;
        S factor = c;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (!scalar_is_zero(rows_[k][j])) v[j] -= factor * rows_[k][j];
      }
      std::size_t p = 0;
      while (p < v.size() && scalar_is_zero(v[p])) ++p;
      if (p == v.size()) return false;
      S inv = scalar_from<S>(1L) / v[p];
      for (auto& x : v) x *= inv;
      // keep earlier rows reduced in the new pivot column
      for (auto& row : rows_) {
        if (scalar_is_zero(row[p])) continue;
        S factor = row[p];
        for (std::size_t j = 0; j < v.size(); ++j)
          if (!scalar_is_zero(v[j])) row[j] -= factor * v[j];
      }
      rows_.push_back(v);
      pivots_.push_back(p);
      return true;
    } else {
      double norm0 = 0.0;
      for (const auto& x : v) norm0 += std::norm(x);
      norm0 = std::sqrt(norm0);
      if (norm0 == 0.0) return false;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : rows_) {
          S d{};
          for (std::size_t j = 0; j < v.size(); ++j) d += std::conj(q[j]) * v[j];
          for (std::size_t j = 0; j < v.size(); ++j) v[j] -= d * q[j];
        }
      double norm = 0.0;
      for (const auto& x : v) norm += std::norm(x);
      norm = std::sqrt(norm);
      if (norm <= tol_ * norm0) return false;
      for (auto& x : v) x /= norm;
      rows_.push_back(v);
      return true;
    }
  }

  const std::vector<std::vector<S>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

 private:
  double tol_;
  std::vector<std::vector<S>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace detail

template <Field S>
Closure<S> algebra_closure(const std::vector<SparseMatrix<S>>& generators, const std::vector<S>& seed,
                           bool check_commuting = false, double tol = 1e-10) {
  if (check_commuting)
    for (std::size_t a = 0; a < generators.size(); ++a)
      for (std::size_t b = a + 1; b < generators.size(); ++b)
        if (!commutes(generators[a], generators[b], tol))
          throw Error("algebra_closure: generators " + std::to_string(a) + " and " + std::to_string(b) +
                      " do not commute");
  detail::IncrementalBasis<S> span(tol);
  std::vector<std::vector<S>> frontier;
  if (span.add(seed)) frontier.push_back(seed);
  while (!frontier.empty()) {
    std::vector<std::vector<S>> next;
    for (const auto& v : frontier)
      for (const auto& g : generators) {
        auto w = g.apply(v);
        if (span.add(w)) next.push_back(std::move(w));
      }
    frontier = std::move(next);
  }
  return Closure<S>{span.rows()};
}

struct CyclicityReport {
  std::size_t target = 0;
  std::vector<std::size_t> achieved;  // closure dimension per trial
  std::size_t attained_max = 0;       // trials reaching the maximum observed dimension
  std::uint64_t seed = 0;
  bool verdict = false;

  std::size_t max_achieved() const {
    return achieved.empty() ? 0 : *std::max_element(achieved.begin(), achieved.end());
  }
};

template <Field S>
std::vector<S> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<S> v(n);
  if constexpr (is_exact_v<S>) {
    for (auto& x : v) {
      Rational q;
      do q = random_rational(rng, 30, 7);
      while (sgn(q) == 0);
      x = S(q);
    }
  } else {
    std::normal_distribution<double> nd;
    for (auto& x : v) x = S(nd(rng), nd(rng));
  }
  return v;
}

/// Generators must already act on the module of interest (e.g. restricted to V^sing).
template <Field S>
CyclicityReport is_cyclic(const std::vector<SparseMatrix<S>>& generators, std::size_t dim, std::size_t trials,
                          std::uint64_t rng_seed, double tol = 1e-10) {
  CyclicityReport rep;
  rep.target = dim;
  rep.seed = rng_seed;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t k = 0; k < trials; ++k) rep.achieved.push_back(algebra_closure(generators, random_vector<S>(rng, dim), false, tol).dim());
  std::size_t mx = rep.max_achieved();
  rep.attained_max = static_cast<std::size_t>(std::count(rep.achieved.begin(), rep.achieved.end(), mx));
  rep.verdict = mx == dim;
  return rep;
}

template <Field S>
CyclicityReport is_cyclic(const GeneratorSet<S>& gens, const Subspace<S>& module, std::size_t trials,
                          std::uint64_t rng_seed, double tol = 1e-10) {
  return is_cyclic(gens.restricted(module).ops, module.dim(), trials, rng_seed, tol);
}

/// ||G A - A^* G|| / ||G A||; zero certifies self-adjointness for <u,v> = u^* G v.
inline double hermitian_check(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& gram) {
  if (op.rows() != gram.rows() || op.cols() != gram.cols()) throw Error("hermitian_check: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success || (gram - gram.adjoint()).norm() > 1e-12 * gram.norm())
    throw Error("hermitian_check: Gram matrix is not positive-definite Hermitian");
  Eigen::MatrixXcd ga = gram * op;
  double denom = ga.norm();
  if (denom == 0.0) return 0.0;
  return (ga - op.adjoint() * gram).norm() / denom;
}

/// Gram matrix B^* G B of a subspace with basis columns B.
template <Field S>
Eigen::MatrixXcd subspace_gram(const TensorSpace& t, const Subspace<S>& sub) {
  Eigen::MatrixXcd b = sub.basis().to_eigen();
  return b.adjoint() * t.gram() * b;
}

struct JointEigenspace {
  std::vector<Complex> values;  // one per generator
  Eigen::MatrixXcd basis;       // columns in the input coordinates, G-orthonormal
  std::size_t multiplicity = 0;
  double residual = 0.0;        // max over generators of ||A v - chi v|| / ||A||
};

struct JointSpectrum {
  std::vector<std::string> labels;
  std::vector<JointEigenspace> spaces;  // sorted lexicographically by tuple
  std::size_t ambient = 0;

  double max_residual() const {
    double r = 0.0;
    for (const auto& s : spaces) r = std::max(r, s.residual);
    return r;
  }
};

namespace detail {

inline bool tuple_less(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return false;
}

inline double tuple_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace detail

/// Common eigenspaces of a commuting family, each operator self-adjoint for the
/// form u^* G v. With G = L L^*, the operators L^* A L^{-*} are Hermitian; blocks
/// are split recursively on one operator at a time, in the given order.
inline JointSpectrum joint_diagonalize(const std::vector<Eigen::MatrixXcd>& ops, const Eigen::MatrixXcd& gram,
                                       const std::vector<std::string>& labels = {},
                                       const SpectralTolerances& tol = {}, bool check = true) {
  const Eigen::Index n = gram.rows();
  JointSpectrum out;
  out.ambient = static_cast<std::size_t>(n);
  out.labels = labels;
  if (out.labels.empty())
    for (std::size_t k = 0; k < ops.size(); ++k) out.labels.push_back("A" + std::to_string(k + 1));
  if (n == 0) return out;

  if (check) {
    for (std::size_t k = 0; k < ops.size(); ++k) {
      double h = hermitian_check(ops[k], gram);
      if (h > tol.hermitian)
        throw Error("joint_diagonalize: " + out.labels[k] + " is not self-adjoint (residual " + std::to_string(h) + ")");
      for (std::size_t j = k + 1; j < ops.size(); ++j) {
        double s = std::max(ops[k].norm() * ops[j].norm(), 1e-300);
        double c = (ops[k] * ops[j] - ops[j] * ops[k]).norm() / s;
        if (c > tol.commutator)
          throw Error("joint_diagonalize: " + out.labels[k] + " and " + out.labels[j] + " do not commute (" +
                      std::to_string(c) + ")");
      }
    }
  }

  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) throw Error("joint_diagonalize: Gram matrix is not positive definite");
  Eigen::MatrixXcd L = llt.matrixL();
  Eigen::MatrixXcd Linv_adj = L.adjoint().triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n, n));
  std::vector<Eigen::MatrixXcd> herm;
  for (const auto& a : ops) {
    Eigen::MatrixXcd h = L.adjoint() * a * Linv_adj;
    herm.push_back((h + h.adjoint()) / 2.0);
  }

  std::vector<Eigen::MatrixXcd> blocks{Eigen::MatrixXcd::Identity(n, n)};
  for (const auto& h : herm) {
    double scale = std::max(h.norm(), 1.0);
    std::vector<Eigen::MatrixXcd> next;
    for (const auto& q : blocks) {
      if (q.cols() == 1) {
        next.push_back(q);
        continue;
      }
      Eigen::MatrixXcd b = q.adjoint() * h * q;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((b + b.adjoint()) / 2.0);
      const auto& ev = es.eigenvalues();
      Eigen::Index start = 0;
      for (Eigen::Index k = 1; k <= ev.size(); ++k) {
        if (k == ev.size() || ev(k) - ev(k - 1) > tol.split * scale) {
          next.push_back(q * es.eigenvectors().middleCols(start, k - start));
          start = k;
        }
      }
    }
    blocks = std::move(next);
  }

  for (const auto& q : blocks) {
    JointEigenspace sp;
    sp.multiplicity = static_cast<std::size_t>(q.cols());
    sp.basis = Linv_adj * q;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      Complex chi = (q.adjoint() * herm[k] * q).trace() / static_cast<double>(q.cols());
      sp.values.push_back(chi);
      double an = std::max(ops[k].norm(), 1e-300);
      sp.residual = std::max(sp.residual, (ops[k] * sp.basis - chi * sp.basis).norm() / an);
    }
    out.spaces.push_back(std::move(sp));
  }
  std::sort(out.spaces.begin(), out.spaces.end(),
            [](const JointEigenspace& a, const JointEigenspace& b) { return detail::tuple_less(a.values, b.values); });
  return out;
}

template <Field S>
JointSpectrum joint_diagonalize(const GeneratorSet<S>& gens, const Eigen::MatrixXcd& gram,
                                const SpectralTolerances& tol = {}, bool check = true) {
  std::vector<Eigen::MatrixXcd> ops;
  for (const auto& op : gens.ops) ops.push_back(op.to_dense());
  return joint_diagonalize(ops, gram, gens.labels, tol, check);
}

struct SimplicityReport {
  bool simple = false;
  bool indeterminate = false;  // some gap between the split floor and the distinctness threshold
  double min_gap = std::numeric_limits<double>::infinity();
};

inline SimplicityReport simple_spectrum(const JointSpectrum& spec, const SpectralTolerances& tol = {}) {
  SimplicityReport r;
  bool mult_one = std::all_of(spec.spaces.begin(), spec.spaces.end(),
                              [](const JointEigenspace& s) { return s.multiplicity == 1; });
  for (std::size_t a = 0; a < spec.spaces.size(); ++a)
    for (std::size_t b = a + 1; b < spec.spaces.size(); ++b)
      r.min_gap = std::min(r.min_gap, detail::tuple_distance(spec.spaces[a].values, spec.spaces[b].values));
  r.indeterminate = r.min_gap > tol.split && r.min_gap < tol.gap;
  r.simple = mult_one && !r.indeterminate && r.min_gap >= tol.gap;
  return r;
}

/// Spectrum of a commuting family that need not be self-adjoint (non-real
/// parameters, non-Hermitian twists). Eigenvectors come from a random real
/// combination; every space has multiplicity one, so a repeated tuple or a
/// nontrivial Jordan block shows up as a small gap or a large residual.
inline JointSpectrum generic_spectrum(const std::vector<Eigen::MatrixXcd>& ops, const std::vector<std::string>& labels,
                                     std::uint64_t seed) {
  JointSpectrum out;
  out.labels = labels;
  if (ops.empty()) return out;
  const Eigen::Index n = ops.front().rows();
  out.ambient = static_cast<std::size_t>(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& a : ops) mix += u(rng) * a / std::max(a.norm(), 1.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mix);
  if (es.info() != Eigen::Success) throw Error("generic_spectrum: eigen solver failed");
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd v = es.eigenvectors().col(j).normalized();
    JointEigenspace sp;
    sp.multiplicity = 1;
    sp.basis = v;
    for (const auto& a : ops) {
      Complex chi = v.dot(a * v);
      sp.values.push_back(chi);
      sp.residual = std::max(sp.residual, (a * v - chi * v).norm() / std::max(a.norm(), 1e-300));
    }
    out.spaces.push_back(std::move(sp));
  }
  std::sort(out.spaces.begin(), out.spaces.end(),
            [](const JointEigenspace& a, const JointEigenspace& b) { return detail::tuple_less(a.values, b.values); });
  return out;
}

/// max_k ||sum_chi chi_k P_chi - A_k|| / ||A_k|| with G-orthogonal projectors P = V V^* G.
inline double reconstruction_error(const JointSpectrum& spec, const std::vector<Eigen::MatrixXcd>& ops,
                                   const Eigen::MatrixXcd& gram) {
  double worst = 0.0;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(ops[k].rows(), ops[k].cols());
    for (const auto& s : spec.spaces) rec += s.values[k] * (s.basis * s.basis.adjoint() * gram);
    worst = std::max(worst, (rec - ops[k]).norm() / std::max(ops[k].norm(), 1e-300));
  }
  return worst;
}

}  // namespace gaudin
