#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "gaudin/lie.hpp"
#include "gaudin/sparse.hpp"
#include "gaudin/tensor_space.hpp"

namespace gaudin {

/// x_basis acting on tensor factor `factor` (1-based).
struct Letter {
  std::uint32_t factor = 1;
  std::uint32_t basis = 0;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// Noncommutative polynomial in the letters x_a^{(i)}, i.e. an element of
/// U(g)^{(x)N} written in words. normal_form() rewrites it in the PBW basis
/// (letters sorted by factor, then basis index).
template <Field S>
class Element {
 public:
  Element() = default;
  explicit Element(std::size_t num_factors) : n_(num_factors) {}

  static Element scalar(std::size_t num_factors, const S& c) {
    Element e(num_factors);
    e.add_term({}, c);
    return e;
  }

  static Element letter(std::size_t num_factors, std::size_t factor, std::size_t basis) {
    if (factor < 1 || factor > num_factors) throw Error("letter factor out of range");
    Element e(num_factors);
    e.add_term({Letter{static_cast<std::uint32_t>(factor), static_cast<std::uint32_t>(basis)}}, scalar_from<S>(1L));
    return e;
  }

  /// x^{(i)} for an algebra element with rational coordinates.
  static Element embed(std::size_t num_factors, const AlgebraElement& x, std::size_t factor) {
    Element e(num_factors);
    for (std::size_t a = 0; a < x.size(); ++a)
      if (sgn(x[a]) != 0) e += letter(num_factors, factor, a) * scalar_from<S>(x[a]);
    return e;
  }

  static Element diagonal(std::size_t num_factors, const AlgebraElement& x) {
    Element e(num_factors);
    for (std::size_t i = 1; i <= num_factors; ++i) e += embed(num_factors, x, i);
    return e;
  }

  /// Omega_{ik} = sum coeff x_a^{(i)} x_b^{(k)}; for i == k the one-factor Casimir.
  static Element omega(std::size_t num_factors, const LieAlgebraData& alg, std::size_t i, std::size_t k) {
    Element e(num_factors);
    for (const auto& t : alg.casimir)
      e += letter(num_factors, i, t.a) * letter(num_factors, k, t.b) * scalar_from<S>(t.coeff);
    return e;
  }

  std::size_t num_factors() const { return n_; }
  const std::map<Word, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
  }

  void add_term(const Word& w, const S& c) {
    if (scalar_is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  Element& operator+=(const Element& o) {
    check(o);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  Element& operator-=(const Element& o) {
    check(o);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  Element& operator*=(const S& s) {
    if (scalar_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, const S& s) { return a *= s; }
  friend Element operator*(const S& s, Element a) { return a *= s; }

  friend Element operator*(const Element& a, const Element& b) {
    a.check(b);
    Element out(a.n_);
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        Word w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        out.add_term(w, ca * cb);
      }
    return out;
  }

  friend bool operator==(const Element& a, const Element& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

  /// PBW normal form: letters on different factors commute; on one factor,
  /// x_a x_b = x_b x_a + [x_a, x_b] brings indices into increasing order.
  Element normal_form(const LieAlgebraData& alg) const {
    Element out(n_);
    std::vector<std::pair<Word, S>> work(terms_.begin(), terms_.end());
    while (!work.empty()) {
      auto [w, c] = std::move(work.back());
      work.pop_back();
      std::size_t k = 0;
      while (k + 1 < w.size() && !(w[k + 1] < w[k])) ++k;
      if (k + 1 >= w.size()) {
        out.add_term(w, c);
        continue;
      }
      Letter x = w[k], y = w[k + 1];
      Word swapped = w;
      std::swap(swapped[k], swapped[k + 1]);
      work.emplace_back(std::move(swapped), c);
      if (x.factor == y.factor) {
        for (std::size_t d = 0; d < alg.dim(); ++d) {
          const Rational& sc = alg.c(x.basis, y.basis, d);
          if (sgn(sc) == 0) continue;
          Word shorter(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
          shorter.push_back(Letter{x.factor, static_cast<std::uint32_t>(d)});
          shorter.insert(shorter.end(), w.begin() + static_cast<std::ptrdiff_t>(k + 2), w.end());
          work.emplace_back(std::move(shorter), c * scalar_from<S>(sc));
        }
      }
    }
    return out;
  }

  /// Image in End(V) for a tensor space with the same number of factors.
  SparseMatrix<S> evaluate(const TensorSpace& t) const {
    if (t.num_factors() != n_) throw Error("element and tensor space differ in number of factors");
    SparseMatrix<S> out(t.dim(), t.dim());
    for (const auto& [w, c] : terms_) {
      if (w.empty()) {
        out.axpy(c, SparseMatrix<S>::identity(t.dim()));
        continue;
      }
      SparseMatrix<S> m = t.basis_op<S>(w[0].factor - 1, w[0].basis);
      for (std::size_t k = 1; k < w.size(); ++k) m = m * t.basis_op<S>(w[k].factor - 1, w[k].basis);
      out.axpy(c, m);
    }
    return out;
  }

  /// Letter-wise substitution: each letter becomes a sum of letters.
  template <class Map>
  Element substitute(std::size_t new_factors, Map&& image_of) const {
    Element out(new_factors);
    for (const auto& [w, c] : terms_) {
      std::vector<std::pair<Word, S>> partial{{Word{}, c}};
      for (const Letter& l : w) {
        std::vector<std::pair<Word, S>> next;
        for (const Letter& img : image_of(l))
          for (const auto& [pw, pc] : partial) {
            Word nw = pw;
            nw.push_back(img);
            next.emplace_back(std::move(nw), pc);
          }
        partial = std::move(next);
      }
      for (const auto& [pw, pc] : partial) out.add_term(pw, pc);
    }
    return out;
  }

 private:
  void check(const Element& o) const {
    if (n_ != o.n_) throw Error("elements live in different tensor powers");
  }

  std::size_t n_ = 0;
  std::map<Word, S> terms_;
};

/// Exact rank of a family of elements after PBW normalization.
template <Field S>
std::size_t pbw_rank(const std::vector<Element<S>>& elems, const LieAlgebraData& alg, double tol = 1e-9) {
  std::map<Word, std::size_t> index;
  std::vector<Element<S>> normal;
  for (const auto& e : elems) {
    normal.push_back(e.normal_form(alg));
    for (const auto& [w, c] : normal.back().terms()) index.emplace(w, index.size());
  }
  Dense<S> m(elems.size(), index.size());
  for (std::size_t r = 0; r < normal.size(); ++r)
    for (const auto& [w, c] : normal[r].terms()) m(r, index[w]) = c;
  return rank(m, tol);
}

}  // namespace gaudin
