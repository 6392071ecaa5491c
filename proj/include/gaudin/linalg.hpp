#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gaudin/field.hpp"
#include "gaudin/sparse.hpp"

namespace gaudin {

/// Small dense row-major matrix over a field; used for exact elimination.
template <Field S>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const S& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<S> column(std::size_t c) const {
    std::vector<S> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  Dense transpose() const {
    Dense t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  static Dense from_columns(const std::vector<std::vector<S>>& columns, std::size_t rows) {
    Dense m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    return m;
  }

  Eigen::MatrixXcd to_eigen() const {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            FieldTraits<S>::to_complex((*this)(r, c));
    return m;
  }

  friend bool operator==(const Dense& a, const Dense& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

template <Field S>
struct Echelon {
  Dense<S> reduced;                 // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Gauss-Jordan elimination. Exact over exact fields; over complex doubles,
/// partial pivoting with entries below `tol` (relative to the largest entry)
/// treated as zero.
template <Field S>
Echelon<S> rref(Dense<S> m, double tol = 1e-12) {
  Echelon<S> out;
  double scale = 0.0;
  if constexpr (!is_exact_v<S>) {
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) scale = std::max(scale, std::abs(m(r, c)));
  }
  auto negligible = [&](const S& v) {
    if constexpr (is_exact_v<S>)
      return scalar_is_zero(v);
    else
      return std::abs(v) <= tol * scale;
  };
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::optional<std::size_t> pivot;
    if constexpr (is_exact_v<S>) {
      for (std::size_t r = row; r < m.rows(); ++r)
        if (!scalar_is_zero(m(r, col))) {
          pivot = r;
          break;
        }
    } else {
      double best = 0.0;
      for (std::size_t r = row; r < m.rows(); ++r)
        if (std::abs(m(r, col)) > best) {
          best = std::abs(m(r, col));
          pivot = r;
        }
      if (pivot && negligible(m(*pivot, col))) pivot.reset();
    }
    if (!pivot) continue;
    if (*pivot != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(row, c), m(*pivot, c));
    S inv = scalar_from<S>(1L) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || scalar_is_zero(m(r, col))) continue;
      S factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (scalar_is_zero(m(row, c))) continue;
        m(r, c) -= factor * m(row, c);
      }
      if constexpr (!is_exact_v<S>) m(r, col) = S{};
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

template <Field S>
std::size_t rank(const Dense<S>& m, double tol = 1e-12) {
  return rref(m, tol).pivots.size();
}

/// Kernel basis: one column per free variable, equal to 1 at that variable
/// and 0 at every other free variable.
template <Field S>
Dense<S> kernel(const Dense<S>& m) {
  auto ech = rref(m);
  std::vector<char> is_pivot(m.cols(), 0);
  for (auto p : ech.pivots) is_pivot[p] = 1;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free.push_back(c);
  Dense<S> k(m.cols(), free.size());
  for (std::size_t j = 0; j < free.size(); ++j) {
    k(free[j], j) = scalar_from<S>(1L);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) k(ech.pivots[r], j) = -ech.reduced(r, free[j]);
  }
  return k;
}

/// A subspace of S^n in anchored form: basis column j equals 1 at row
/// anchors[j] and 0 at every other anchor row. Restricted operators are then
/// read off the anchor rows.
template <Field S>
class Subspace {
 public:
  Subspace() = default;

  /// Basis columns need not be independent; the span is what counts.
  static Subspace span_of(const Dense<S>& columns) {
    Subspace out;
    out.ambient_ = columns.rows();
    auto ech = rref(columns.transpose());
    std::size_t k = ech.pivots.size();
    out.basis_ = Dense<S>(columns.rows(), k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < columns.rows(); ++r) out.basis_(r, j) = ech.reduced(j, r);
    out.anchors_ = ech.pivots;
    return out;
  }

  static Subspace whole(std::size_t n) {
    Dense<S> id(n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = scalar_from<S>(1L);
    return span_of(id);
  }

  std::size_t dim() const { return basis_.cols(); }
  std::size_t ambient_dim() const { return ambient_; }
  const Dense<S>& basis() const { return basis_; }
  const std::vector<std::size_t>& anchors() const { return anchors_; }

  /// Embeds coordinates (length dim) into the ambient space.
  std::vector<S> lift(const std::vector<S>& coords) const {
    std::vector<S> v(ambient_);
    for (std::size_t j = 0; j < dim(); ++j) {
      if (scalar_is_zero(coords[j])) continue;
      for (std::size_t r = 0; r < ambient_; ++r)
        if (!scalar_is_zero(basis_(r, j))) v[r] += coords[j] * basis_(r, j);
    }
    return v;
  }

  template <Field T>
  Subspace<T> convert() const {
    Subspace<T> out;
    out.ambient_ = ambient_;
    out.anchors_ = anchors_;
    out.basis_ = Dense<T>(basis_.rows(), basis_.cols());
    for (std::size_t r = 0; r < basis_.rows(); ++r)
      for (std::size_t c = 0; c < basis_.cols(); ++c)
        out.basis_(r, c) = FieldTraits<T>::from(to_gaussian(basis_(r, c)));
    return out;
  }

 private:
  template <Field>
  friend class Subspace;

  static GaussianRational to_gaussian(const GaussianRational& x) { return x; }
  static GaussianRational to_gaussian(const Complex&) {
    throw Error("cannot convert a floating subspace to an exact one");
  }

  std::size_t ambient_ = 0;
  Dense<S> basis_;
  std::vector<std::size_t> anchors_;
};

/// Matrix of `op` restricted to an invariant subspace, in the subspace's
/// anchored coordinates. Throws if the subspace is not invariant; the message
/// carries the residual.
template <Field S>
SparseMatrix<S> restrict_to(const SparseMatrix<S>& op, const Subspace<S>& sub, double rel_tol = 1e-10) {
  const std::size_t n = sub.ambient_dim(), k = sub.dim();
  if (op.rows() != n || op.cols() != n) throw Error("restrict_to: operator and subspace differ in dimension");
  SparseMatrix<S> out(k, k);
  double residual = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<S> image = op.apply(sub.basis().column(j));
    std::vector<S> coords(k);
    for (std::size_t i = 0; i < k; ++i) coords[i] = image[sub.anchors()[i]];
    std::vector<S> back = sub.lift(coords);
    for (std::size_t r = 0; r < n; ++r) {
      S diff = back[r] - image[r];
      if constexpr (is_exact_v<S>) {
        if (!scalar_is_zero(diff))
          throw Error("subspace is not invariant under operator (residual entry " +
                      to_string(diff) + ")");
      } else {
        residual = std::max(residual, std::abs(diff));
        scale = std::max(scale, std::abs(image[r]));
      }
    }
    for (std::size_t i = 0; i < k; ++i) out.add(i, j, coords[i]);
  }
  if constexpr (!is_exact_v<S>) {
    if (residual > rel_tol * std::max(scale, 1.0))
      throw Error("subspace is not invariant under operator (residual " + std::to_string(residual) + ")");
  }
  return out;
}

}  // namespace gaudin
