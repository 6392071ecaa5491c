#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "gaudin/lie.hpp"
#include "gaudin/linalg.hpp"
#include "gaudin/sparse.hpp"

namespace gaudin {

/// V_1 (x) ... (x) V_N with lexicographic basis order (last factor fastest).
/// Factor-embedded basis operators are built once, exactly and in complex
/// doubles; the object is immutable afterwards.
class TensorSpace {
 public:
  TensorSpace(Algebra alg, std::vector<Module> factors) : alg_(std::move(alg)), factors_(std::move(factors)) {
    if (factors_.empty()) throw Error("tensor space needs at least one factor");
    strides_.assign(factors_.size(), 1);
    dim_ = 1;
    for (std::size_t i = factors_.size(); i-- > 0;) {
      strides_[i] = dim_;
      dim_ *= factors_[i].dim;
    }
    exact_ops_.resize(factors_.size());
    complex_ops_.resize(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i)
      for (std::size_t a = 0; a < alg_->dim(); ++a) {
        exact_ops_[i].push_back(embed_matrix(factors_[i].action[a], i));
        complex_ops_[i].push_back(exact_ops_[i].back().to_complex());
      }
    gram_.assign(dim_, Rational(1));
    for (std::size_t r = 0; r < dim_; ++r) {
      auto idx = multi_index(r);
      for (std::size_t i = 0; i < factors_.size(); ++i) gram_[r] *= factors_[i].gram[idx[i]];
    }
    weights_.assign(dim_, std::vector<Rational>(alg_->cartan.size(), Rational(0)));
    for (std::size_t k = 0; k < alg_->cartan.size(); ++k) {
      auto diag = diagonal_action<QQ>(alg_->basis(alg_->cartan[k]));
      for (std::size_t r = 0; r < dim_; ++r) weights_[r][k] = diag.at(r, r).real();
    }
  }

  const Algebra& algebra() const { return alg_; }
  const LieAlgebraData& alg() const { return *alg_; }
  std::size_t num_factors() const { return factors_.size(); }
  const Module& factor(std::size_t i) const { return factors_[i]; }
  std::size_t dim() const { return dim_; }

  std::vector<int> highest_weights() const {
    std::vector<int> w;
    for (const auto& f : factors_) w.push_back(f.highest_weight);
    return w;
  }

  std::vector<std::size_t> multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) idx[i] = (flat / strides_[i]) % factors_[i].dim;
    return idx;
  }

  std::size_t flat_index(const std::vector<std::size_t>& idx) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (idx[i] >= factors_[i].dim) throw Error("multi-index out of range");
      r += idx[i] * strides_[i];
    }
    return r;
  }

  /// x_a acting on factor i (0-based), identity elsewhere.
  template <Field S>
  const SparseMatrix<S>& basis_op(std::size_t i, std::size_t a) const {
    if (i >= factors_.size()) throw Error("factor index out of range");
    if constexpr (is_exact_v<S>)
      return exact_ops_[i][a];
    else
      return complex_ops_[i][a];
  }

  /// x^{(i)} for an algebra element x; i is 1-based.
  template <Field S>
  SparseMatrix<S> embed_factor(const AlgebraElement& x, std::size_t i) const {
    if (i < 1 || i > factors_.size())
      throw Error("factor index " + std::to_string(i) + " out of range 1.." + std::to_string(factors_.size()));
    SparseMatrix<S> out(dim_, dim_);
    for (std::size_t a = 0; a < alg_->dim(); ++a)
      if (sgn(x[a]) != 0) out.axpy(scalar_from<S>(x[a]), basis_op<S>(i - 1, a));
    return out;
  }

  /// diag(x) = sum_i x^{(i)}.
  template <Field S>
  SparseMatrix<S> diagonal_action(const AlgebraElement& x) const {
    SparseMatrix<S> out(dim_, dim_);
    for (std::size_t i = 1; i <= factors_.size(); ++i) out += embed_factor<S>(x, i);
    return out;
  }

  /// Diagonal of the Hermitian Gram form (product of factor norms).
  const std::vector<Rational>& gram_diagonal() const { return gram_; }

  Eigen::MatrixXcd gram() const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t r = 0; r < dim_; ++r) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = gram_[r].get_d();
    return g;
  }

  /// Eigenvalues of the Cartan basis elements on each basis vector.
  const std::vector<Rational>& weight(std::size_t flat) const { return weights_[flat]; }

  /// Eigenvalue of diag(principal h) on each basis vector.
  Rational principal_weight(std::size_t flat) const {
    Rational w = 0;
    for (std::size_t k = 0; k < alg_->cartan.size(); ++k) w += alg_->principal_h[alg_->cartan[k]] * weights_[flat][k];
    return w;
  }

 private:
  SparseMatrix<QQ> embed_matrix(const SparseMatrix<QQ>& x, std::size_t i) const {
    SparseMatrix<QQ> out(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      std::size_t ri = (r / strides_[i]) % factors_[i].dim;
      for (const auto& [b, v] : x.row(ri)) out.add(r, r + (b - ri) * strides_[i], v);
    }
    return out;
  }

  Algebra alg_;
  std::vector<Module> factors_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
  std::vector<std::vector<SparseMatrix<QQ>>> exact_ops_;
  std::vector<std::vector<SparseMatrix<Complex>>> complex_ops_;
  std::vector<Rational> gram_;
  std::vector<std::vector<Rational>> weights_;
};

/// Tensor product of sl2 irreducibles V_{lambda_1} (x) ... (x) V_{lambda_N}.
inline TensorSpace sl2_tensor_space(const Algebra& alg, const std::vector<int>& weights) {
  std::vector<Module> mods;
  for (int l : weights) mods.push_back(sl2_module(*alg, l));
  return TensorSpace(alg, std::move(mods));
}

/// N copies of the defining module of sl_n.
inline TensorSpace defining_tensor_space(const Algebra& alg, std::size_t copies) {
  return TensorSpace(alg, std::vector<Module>(copies, defining_module(*alg)));
}

namespace detail {

/// Basis vectors grouped by their full Cartan weight.
inline std::map<std::vector<Rational>, std::vector<std::size_t>> weight_blocks(const TensorSpace& t) {
  std::map<std::vector<Rational>, std::vector<std::size_t>> blocks;
  for (std::size_t r = 0; r < t.dim(); ++r) blocks[t.weight(r)].push_back(r);
  return blocks;
}

}  // namespace detail

/// Exact basis of the vectors killed by every diag(simple raising operator).
/// Computed weight space by weight space, since raising operators shift weights.
inline Subspace<QQ> singular_subspace(const TensorSpace& t) {
  // row c of the adjoint holds (conjugated) column c of the operator
  std::vector<SparseMatrix<QQ>> raising_columns;
  for (const auto& e : t.alg().simple_raising) raising_columns.push_back(t.diagonal_action<QQ>(e).adjoint());
  std::vector<std::vector<QQ>> columns;
  for (const auto& [weight, rows] : detail::weight_blocks(t)) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> row_index;
    std::vector<std::vector<std::pair<std::size_t, QQ>>> col_entries(rows.size());
    for (std::size_t k = 0; k < raising_columns.size(); ++k)
      for (std::size_t c = 0; c < rows.size(); ++c)
        for (const auto& [r, v] : raising_columns[k].row(rows[c])) {
          auto [it, inserted] = row_index.emplace(std::make_pair(k, r), row_index.size());
          col_entries[c].emplace_back(it->second, v.conj());
        }
    Dense<QQ> block(row_index.size(), rows.size());
    for (std::size_t c = 0; c < rows.size(); ++c)
      for (const auto& [r, v] : col_entries[c]) block(r, c) = v;
    Dense<QQ> ker = kernel(block);
    for (std::size_t j = 0; j < ker.cols(); ++j) {
      std::vector<QQ> v(t.dim());
      for (std::size_t c = 0; c < rows.size(); ++c) v[rows[c]] = ker(c, j);
      columns.push_back(std::move(v));
    }
  }
  return Subspace<QQ>::span_of(Dense<QQ>::from_columns(columns, t.dim()));
}

/// Singular vectors of a single diag-Cartan weight.
inline Subspace<QQ> singular_subspace_of_weight(const TensorSpace& t, const std::vector<Rational>& weight) {
  auto sing = singular_subspace(t);
  std::vector<std::vector<QQ>> cols;
  for (std::size_t j = 0; j < sing.dim(); ++j)
    if (t.weight(sing.anchors()[j]) == weight) cols.push_back(sing.basis().column(j));
  return Subspace<QQ>::span_of(Dense<QQ>::from_columns(cols, t.dim()));
}

/// sl2 convenience: singular vectors of h-weight nu.
inline Subspace<QQ> singular_subspace_sl2(const TensorSpace& t, int nu) {
  return singular_subspace_of_weight(t, {Rational(nu)});
}

/// One isotypic component of the diagonal action.
struct IsotypicBlock {
  std::vector<Rational> highest_weight;  // Cartan weight of its singular vectors
  Rational casimir_value;                // eigenvalue of the diagonal Casimir
  std::size_t multiplicity = 0;
  std::size_t dimension = 0;  // multiplicity * dim V_nu
  SparseMatrix<QQ> projector;
};

/// Diagonal Casimir sum_ab coeff diag(x_a) diag(x_b).
template <Field S>
SparseMatrix<S> diagonal_casimir(const TensorSpace& t) {
  SparseMatrix<S> c(t.dim(), t.dim());
  std::vector<SparseMatrix<S>> diag;
  for (std::size_t a = 0; a < t.alg().dim(); ++a) diag.push_back(t.diagonal_action<S>(t.alg().basis(a)));
  for (const auto& term : t.alg().casimir) c.axpy(scalar_from<S>(term.coeff), diag[term.a] * diag[term.b]);
  return c;
}

/// Orthogonal projectors onto the isotypic components, as Lagrange polynomials
/// in the diagonal Casimir (whose eigenvalue separates the components).
inline std::vector<IsotypicBlock> isotypic_decomposition(const TensorSpace& t) {
  auto sing = singular_subspace(t);
  auto cas = diagonal_casimir<QQ>(t);
  std::map<std::vector<Rational>, IsotypicBlock> by_weight;
  for (std::size_t j = 0; j < sing.dim(); ++j) {
    auto w = t.weight(sing.anchors()[j]);
    auto& blk = by_weight[w];
    blk.highest_weight = w;
    ++blk.multiplicity;
    auto v = sing.basis().column(j);
    auto cv = cas.apply(v);
    blk.casimir_value = (cv[sing.anchors()[j]] / v[sing.anchors()[j]]).real();
  }
  std::vector<IsotypicBlock> blocks;
  for (auto& [w, b] : by_weight) blocks.push_back(std::move(b));
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (blocks[i].casimir_value == blocks[j].casimir_value)
        throw Error("diagonal Casimir does not separate isotypic components");
  const auto id = SparseMatrix<QQ>::identity(t.dim());
  for (auto& b : blocks) {
    SparseMatrix<QQ> p = id;
    for (const auto& other : blocks) {
      if (&other == &b) continue;
      SparseMatrix<QQ> factor = cas - id * QQ(other.casimir_value);
      factor *= QQ(Rational(1 / (b.casimir_value - other.casimir_value)));
      p = p * factor;
    }
    QQ tr;
    for (std::size_t r = 0; r < t.dim(); ++r) tr += p.at(r, r);
    b.dimension = static_cast<std::size_t>(tr.real().get_d() + 0.5);
    b.projector = std::move(p);
  }
  return blocks;
}

}  // namespace gaudin
