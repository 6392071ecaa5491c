#include <gtest/gtest.h>

#include <Eigen/LU>

#include "gaudin/spectral.hpp"

using namespace gaudin;

namespace {

SparseMatrix<QQ> qdiag(std::vector<long> d) {
  std::vector<QQ> v;
  for (long x : d) v.push_back(QQ(x));
  return SparseMatrix<QQ>::diagonal(v);
}

Eigen::MatrixXcd cdiag(std::vector<double> d) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t k = 0; k < d.size(); ++k) v(static_cast<Eigen::Index>(k)) = d[k];
  return v.asDiagonal();
}

// spin-1/2 chain oracle: Omega_ik = P_ik - 1/2 with P the factor swap
Eigen::MatrixXd swap_matrix(int n, int i, int k) {
  int dim = 1 << n;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    int bi = (s >> (n - 1 - i)) & 1, bk = (s >> (n - 1 - k)) & 1;
    int t = s & ~(1 << (n - 1 - i)) & ~(1 << (n - 1 - k));
    t |= bk << (n - 1 - i);
    t |= bi << (n - 1 - k);
    p(t, s) = 1;
  }
  return p;
}

}  // namespace

TEST(Spectral, ClosureExamples) {
  std::vector<QQ> ones{QQ(1L), QQ(1L), QQ(1L)};
  EXPECT_EQ(algebra_closure<QQ>({SparseMatrix<QQ>::identity(3)}, ones).dim(), 1u);
  EXPECT_EQ(algebra_closure<QQ>({qdiag({1, 2, 3})}, ones).dim(), 3u);
  EXPECT_EQ(algebra_closure<QQ>({qdiag({1, 1, 2})}, ones).dim(), 2u);
  std::vector<Complex> cones(3, Complex(1.0));
  EXPECT_EQ(algebra_closure<Complex>({qdiag({1, 2, 3}).to_complex()}, cones).dim(), 3u);
  EXPECT_EQ(algebra_closure<Complex>({qdiag({1, 1, 2}).to_complex()}, cones).dim(), 2u);
  auto rep = is_cyclic<QQ>({SparseMatrix<QQ>::identity(2)}, 2, 5, 1);
  EXPECT_FALSE(rep.verdict);
  EXPECT_THROW(algebra_closure<QQ>({qdiag({1, 2, 3}), SparseMatrix<QQ>(3, 3) + [] {
                                      SparseMatrix<QQ> m(3, 3);
                                      m.add(0, 1, QQ(1L));
                                      return m;
                                    }()},
                                   ones, true),
               Error);
}

TEST(Spectral, DiagonalFamilies) {
  auto s = joint_diagonalize({cdiag({1, 2, 2})}, Eigen::MatrixXcd::Identity(3, 3));
  ASSERT_EQ(s.spaces.size(), 2u);
  EXPECT_EQ(s.spaces[0].multiplicity, 1u);
  EXPECT_EQ(s.spaces[1].multiplicity, 2u);
  EXPECT_NEAR(s.spaces[1].values[0].real(), 2.0, 1e-14);
  EXPECT_FALSE(simple_spectrum(s).simple);

  auto p = joint_diagonalize({cdiag({1, 1, 2}), cdiag({3, 4, 5})}, Eigen::MatrixXcd::Identity(3, 3));
  EXPECT_EQ(p.spaces.size(), 3u);
  EXPECT_TRUE(simple_spectrum(p).simple);
  EXPECT_NEAR(simple_spectrum(p).min_gap, 1.0, 1e-14);
}

TEST(Spectral, IndeterminateGap) {
  auto s = joint_diagonalize({cdiag({1, 1 + 1e-10, 3})}, Eigen::MatrixXcd::Identity(3, 3));
  auto r = simple_spectrum(s);
  EXPECT_TRUE(r.indeterminate);
  EXPECT_FALSE(r.simple);
}

TEST(Spectral, TwoSiteSingular) {
  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {1, 1});
  auto sing = singular_subspace(t);
  GaudinParams<QQ> p(alg, {QQ(0L), QQ(1L)});
  auto gens = generator_set(p, t).restricted(sing);
  auto rep = is_cyclic(gens.ops, sing.dim(), 20, 42);
  EXPECT_TRUE(rep.verdict);
  EXPECT_EQ(rep.attained_max, 20u);
  auto spec = joint_diagonalize(gens, subspace_gram(t, sing));
  ASSERT_EQ(spec.spaces.size(), 2u);
  // S^{1,1} = 2 H_1 with H_1 = -1/2 (triplet), 3/2 (singlet)
  EXPECT_NEAR(spec.spaces[0].values[0].real(), -1.0, 1e-12);
  EXPECT_NEAR(spec.spaces[1].values[0].real(), 3.0, 1e-12);
  EXPECT_TRUE(simple_spectrum(spec).simple);
}

TEST(Spectral, FourSiteMatchesSwapOracle) {
  const int n = 4;
  std::vector<double> z{0, 1, 2, 3};
  std::vector<Eigen::MatrixXd> h(n, Eigen::MatrixXd::Zero(16, 16));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (i != k) h[i] += (swap_matrix(n, i, k) - 0.5 * Eigen::MatrixXd::Identity(16, 16)) / (z[i] - z[k]);
  // V^sing = ker(diag e); e sends the 1-bit (v1) of a factor to the 0-bit (v0)
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(16, 16);
  for (int s = 0; s < 16; ++s)
    for (int i = 0; i < n; ++i)
      if ((s >> (n - 1 - i)) & 1) e(s & ~(1 << (n - 1 - i)), s) += 1;
  Eigen::MatrixXd ker = Eigen::FullPivLU<Eigen::MatrixXd>(e).kernel();
  ASSERT_EQ(ker.cols(), 6);
  Eigen::MatrixXd pinv = (ker.transpose() * ker).inverse() * ker.transpose();
  Eigen::MatrixXd mix = pinv * (h[0] + 0.3 * h[1] + 0.07 * h[2]) * ker;
  Eigen::VectorXcd oracle = mix.eigenvalues();
  std::vector<double> want;
  for (int k = 0; k < 6; ++k) want.push_back(oracle(k).real());
  std::sort(want.begin(), want.end());

  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {1, 1, 1, 1});
  auto sing = singular_subspace(t);
  GaudinParams<QQ> p(alg, {QQ(0L), QQ(1L), QQ(2L), QQ(3L)});
  auto gens = generator_set(p, t).restricted(sing);
  auto spec = joint_diagonalize(gens, subspace_gram(t, sing));
  ASSERT_EQ(spec.spaces.size(), 6u);
  std::vector<double> got;
  for (const auto& sp : spec.spaces)
    got.push_back((sp.values[0] + 0.3 * sp.values[2] + 0.07 * sp.values[4]).real() / 2.0);
  std::sort(got.begin(), got.end());
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(got[k], want[k], 1e-10);
  auto simple = simple_spectrum(spec);
  EXPECT_TRUE(simple.simple);
  EXPECT_GT(simple.min_gap, 1e-3);

  std::vector<Eigen::MatrixXcd> dense;
  for (const auto& op : gens.ops) dense.push_back(op.to_dense());
  EXPECT_LT(reconstruction_error(spec, dense, subspace_gram(t, sing)), 1e-10);

  // splitting order does not change the partition
  std::vector<Eigen::MatrixXcd> rev(dense.rbegin(), dense.rend());
  auto spec2 = joint_diagonalize(rev, subspace_gram(t, sing));
  ASSERT_EQ(spec2.spaces.size(), 6u);
  for (const auto& a : spec.spaces) {
    bool found = false;
    for (const auto& b : spec2.spaces) {
      std::vector<Complex> br(b.values.rbegin(), b.values.rend());
      if (detail::tuple_distance(a.values, br) < 1e-9) found = true;
    }
    EXPECT_TRUE(found);
  }
  auto cyc = is_cyclic(gens.ops, 6, 20, 9);
  EXPECT_TRUE(cyc.verdict);
}

TEST(Spectral, HermitianChecks) {
  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {1, 2});
  Eigen::MatrixXcd g = t.gram();
  EXPECT_EQ(hermitian_check(t.embed_factor<QQ>(alg->basis(2), 1).to_dense(), g), 0.0);
  EXPECT_GT(hermitian_check(t.embed_factor<QQ>(alg->basis(0), 1).to_dense(), g), 0.1);
  GaudinParams<Complex> p(alg, {Complex(0.25), Complex(-1.5)});
  EXPECT_LT(hermitian_check(quadratic_hamiltonian(1, p, t).to_dense(), g), 1e-12);
  EXPECT_THROW(hermitian_check(g, -g), Error);
}
