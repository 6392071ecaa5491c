#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaudin/field.hpp"

namespace gaudin {

/// Row-compressed sparse matrix over a scalar field. Rows keep their entries
/// sorted by column and never store exact zeros.
template <Field S>
class SparseMatrix {
 public:
  using Scalar = S;
  using Entry = std::pair<std::size_t, S>;
  static constexpr FieldTag field = FieldTraits<S>::tag;

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i].emplace_back(i, scalar_from<S>(1L));
    return m;
  }

  static SparseMatrix diagonal(const std::vector<S>& d) {
    SparseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!scalar_is_zero(d[i])) m.data_[i].emplace_back(i, d[i]);
    return m;
  }

  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return cols_; }
  const std::vector<Entry>& row(std::size_t r) const { return data_[r]; }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const auto& r) { return r.empty(); });
  }

  S at(std::size_t r, std::size_t c) const {
    const auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, std::size_t col) { return e.first < col; });
    if (it != row.end() && it->first == c) return it->second;
    return S{};
  }

  /// Adds v to entry (r, c).
  void add(std::size_t r, std::size_t c, const S& v) {
    if (scalar_is_zero(v)) return;
    auto& row = data_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, std::size_t col) { return e.first < col; });
    if (it != row.end() && it->first == c) {
      it->second += v;
      if (scalar_is_zero(it->second)) row.erase(it);
    } else {
      row.insert(it, Entry{c, v});
    }
  }

  SparseMatrix& operator*=(const S& s) {
    if (scalar_is_zero(s)) {
      for (auto& r : data_) r.clear();
      return *this;
    }
    for (auto& r : data_)
      for (auto& e : r) e.second *= s;
    return *this;
  }

  SparseMatrix& operator+=(const SparseMatrix& o) { return axpy(scalar_from<S>(1L), o); }
  SparseMatrix& operator-=(const SparseMatrix& o) { return axpy(scalar_from<S>(-1L), o); }

  /// this += s * o
  SparseMatrix& axpy(const S& s, const SparseMatrix& o) {
    check_same_shape(o);
    if (scalar_is_zero(s)) return *this;
    for (std::size_t r = 0; r < data_.size(); ++r) {
      if (o.data_[r].empty()) continue;
      std::vector<Entry> merged;
      merged.reserve(data_[r].size() + o.data_[r].size());
      auto a = data_[r].begin(), ae = data_[r].end();
      auto b = o.data_[r].begin(), be = o.data_[r].end();
      while (a != ae || b != be) {
        if (b == be || (a != ae && a->first < b->first)) {
          merged.push_back(std::move(*a++));
        } else if (a == ae || b->first < a->first) {
          merged.emplace_back(b->first, s * b->second);
          ++b;
        } else {
          S v = a->second + s * b->second;
          if (!scalar_is_zero(v)) merged.emplace_back(a->first, std::move(v));
          ++a;
          ++b;
        }
      }
      data_[r] = std::move(merged);
    }
    return *this;
  }

  friend SparseMatrix operator+(SparseMatrix a, const SparseMatrix& b) { return a += b; }
  friend SparseMatrix operator-(SparseMatrix a, const SparseMatrix& b) { return a -= b; }
  friend SparseMatrix operator*(SparseMatrix a, const S& s) { return a *= s; }
  friend SparseMatrix operator*(const S& s, SparseMatrix a) { return a *= s; }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows()) throw Error("sparse product: dimension mismatch");
    SparseMatrix out(a.rows(), b.cols_);
    std::vector<S> acc(b.cols_);
    std::vector<char> used(b.cols_, 0);
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      touched.clear();
      for (const auto& [k, av] : a.data_[r]) {
        for (const auto& [c, bv] : b.data_[k]) {
          if (!used[c]) {
            used[c] = 1;
            touched.push_back(c);
            acc[c] = av * bv;
          } else {
            acc[c] += av * bv;
          }
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = out.data_[r];
      for (std::size_t c : touched) {
        if (!scalar_is_zero(acc[c])) row.emplace_back(c, std::move(acc[c]));
        acc[c] = S{};
        used[c] = 0;
      }
    }
    return out;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::vector<S> apply(const std::vector<S>& x) const {
    if (x.size() != cols_) throw Error("sparse apply: dimension mismatch");
    std::vector<S> y(rows());
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, v] : data_[r]) y[r] += v * x[c];
    return y;
  }

  /// Conjugate transpose.
  SparseMatrix adjoint() const {
    SparseMatrix out(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, v] : data_[r]) out.data_[c].emplace_back(r, FieldTraits<S>::conj(v));
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& r : data_)
      for (const auto& e : r) m = std::max(m, FieldTraits<S>::magnitude(e.second));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& r : data_)
      for (const auto& e : r) {
        double m = FieldTraits<S>::magnitude(e.second);
        s += m * m;
      }
    return std::sqrt(s);
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows()),
                                                 static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, v] : data_[r])
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = FieldTraits<S>::to_complex(v);
    return m;
  }

  SparseMatrix<Complex> to_complex() const {
    SparseMatrix<Complex> out(rows(), cols_);
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, v] : data_[r]) out.add(r, c, FieldTraits<S>::to_complex(v));
    return out;
  }

 private:
  void check_same_shape(const SparseMatrix& o) const {
    if (rows() != o.rows() || cols_ != o.cols_) throw Error("sparse matrices differ in shape");
  }

  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> data_;
};

template <Field S>
SparseMatrix<S> commutator(const SparseMatrix<S>& a, const SparseMatrix<S>& b) {
  return a * b - b * a;
}

/// Exact test for exact fields; relative Frobenius test with the given
/// tolerance otherwise.
template <Field S>
bool commutes(const SparseMatrix<S>& a, const SparseMatrix<S>& b, double rel_tol = 1e-10) {
  if constexpr (is_exact_v<S>) {
    return a * b == b * a;
  } else {
    double scale = a.frobenius_norm() * b.frobenius_norm();
    return commutator(a, b).frobenius_norm() <= rel_tol * std::max(scale, 1e-300);
  }
}

template <Field S>
SparseMatrix<S> sparse_from_dense(const Eigen::MatrixXcd& m)
  requires std::same_as<S, Complex>
{
  SparseMatrix<S> out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c));
  return out;
}

}  // namespace gaudin
