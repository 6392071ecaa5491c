#include <gtest/gtest.h>

#include "gaudin/tensor_space.hpp"

using namespace gaudin;

namespace {

// multiplicity of V_nu in the tensor product, from weight-space dimensions
std::map<int, int> character_multiplicities(const std::vector<int>& weights) {
  std::map<int, int> dimw{{0, 1}};
  for (int l : weights) {
    std::map<int, int> next;
    for (auto [w, d] : dimw)
      for (int k = 0; k <= l; ++k) next[w + l - 2 * k] += d;
    dimw = next;
  }
  std::map<int, int> mult;
  for (auto [w, d] : dimw)
    if (w >= 0) {
      int m = d - (dimw.count(w + 2) ? dimw[w + 2] : 0);
      if (m > 0) mult[w] = m;
    }
  return mult;
}

}  // namespace

TEST(TensorSpace, Dimensions) {
  auto alg = build_algebra("sl2");
  EXPECT_EQ(sl2_tensor_space(alg, {1, 2, 3}).dim(), 24u);
  auto s3 = build_algebra("sl3");
  EXPECT_EQ(defining_tensor_space(s3, 3).dim(), 27u);
}

TEST(TensorSpace, EmbedFactor) {
  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {1, 1});
  auto h1 = t.embed_factor<QQ>(alg->basis(2), 1);
  EXPECT_EQ(h1, SparseMatrix<QQ>::diagonal({QQ(1L), QQ(1L), QQ(-1L), QQ(-1L)}));
  EXPECT_THROW(t.embed_factor<QQ>(alg->basis(2), 0), Error);
  EXPECT_THROW(t.embed_factor<QQ>(alg->basis(2), 3), Error);

  auto t3 = sl2_tensor_space(alg, {1, 2, 1});
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      auto x = alg->basis(a), y = alg->basis(b);
      EXPECT_TRUE(commutator(t3.embed_factor<QQ>(x, 1), t3.embed_factor<QQ>(y, 2)).is_zero());
      EXPECT_EQ(commutator(t3.embed_factor<QQ>(x, 2), t3.embed_factor<QQ>(y, 2)),
                t3.embed_factor<QQ>(alg->bracket(x, y), 2));
    }
}

TEST(TensorSpace, GramAdjoints) {
  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {2, 1, 3});
  std::vector<QQ> g;
  for (const auto& v : t.gram_diagonal()) g.push_back(QQ(v));
  auto G = SparseMatrix<QQ>::diagonal(g);
  auto e = t.diagonal_action<QQ>(alg->basis(0)), f = t.diagonal_action<QQ>(alg->basis(1));
  auto h = t.diagonal_action<QQ>(alg->basis(2));
  // <e u, v> = <u, f v>  <=>  e^T G = G f
  EXPECT_EQ(e.adjoint() * G, G * f);
  EXPECT_EQ(h.adjoint() * G, G * h);
  for (const auto& v : t.gram_diagonal()) EXPECT_GT(sgn(v), 0);
}

TEST(TensorSpace, SingularDimensionsMatchCharacters) {
  auto alg = build_algebra("sl2");
  EXPECT_EQ(singular_subspace(sl2_tensor_space(alg, {1, 1})).dim(), 2u);
  EXPECT_EQ(singular_subspace(sl2_tensor_space(alg, {1, 1, 1, 1})).dim(), 6u);
  EXPECT_EQ(singular_subspace(sl2_tensor_space(alg, {2, 2})).dim(), 3u);
  for (std::vector<int> w : {std::vector<int>{1, 1, 1}, {2, 1, 1}, {3, 2, 1}, {2, 2, 2}, {1, 1, 1, 1, 1}, {5, 5, 5, 5}}) {
    auto t = sl2_tensor_space(alg, w);
    auto mult = character_multiplicities(w);
    int total = 0;
    for (auto [nu, m] : mult) {
      total += m;
      EXPECT_EQ(singular_subspace_sl2(t, nu).dim(), static_cast<std::size_t>(m));
    }
    EXPECT_EQ(singular_subspace(t).dim(), static_cast<std::size_t>(total));
  }
}

TEST(TensorSpace, Sl3SingularVectors) {
  // C^3 (x) C^3 = Sym^2 + Lambda^2, (C^3)^3 = S^3 + 2 adjoint-type + Lambda^3
  auto s3 = build_algebra("sl3");
  EXPECT_EQ(singular_subspace(defining_tensor_space(s3, 2)).dim(), 2u);
  EXPECT_EQ(singular_subspace(defining_tensor_space(s3, 3)).dim(), 4u);
}

TEST(TensorSpace, IsotypicProjectors) {
  auto alg = build_algebra("sl2");
  auto check = [&](std::vector<int> w, std::vector<std::size_t> dims) {
    auto t = sl2_tensor_space(alg, w);
    auto blocks = isotypic_decomposition(t);
    std::vector<std::size_t> got;
    auto sum = SparseMatrix<QQ>(t.dim(), t.dim());
    for (const auto& b : blocks) {
      got.push_back(b.dimension);
      EXPECT_EQ(b.projector * b.projector, b.projector);
      sum += b.projector;
      for (const auto& c : blocks) {
        if (&c != &b) {
          EXPECT_TRUE((b.projector * c.projector).is_zero());
        }
      }
    }
    EXPECT_EQ(sum, SparseMatrix<QQ>::identity(t.dim()));
    std::sort(got.begin(), got.end());
    std::sort(dims.begin(), dims.end());
    EXPECT_EQ(got, dims);
  };
  check({1, 1}, {3, 1});
  check({1, 1, 1, 1}, {5, 9, 2});
  check({2, 2}, {5, 3, 1});
}
