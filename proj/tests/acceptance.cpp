// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "gaudin/all.hpp"

using namespace gaudin;

namespace {

constexpr double commute_budget_s = 60.0;
constexpr double cyclic_budget_s = 120.0;
constexpr double cover_budget_s = 300.0;
constexpr double gap_floor = 1e-8;
constexpr double hermitian_tol = 1e-12;
constexpr double obstruction_tol = 1e-10;
constexpr double collision_deviation_tol = 1e-6;
constexpr double collision_ratio_tol = 0.6;
constexpr double collision_s = 1e-4;
constexpr std::size_t cyclic_trials = 20;
constexpr std::size_t cyclic_required = 18;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (failures.size() < 5) failures.push_back(what);
    }
  }
};

std::vector<QQ> random_real_points(std::mt19937_64& rng, std::size_t n) {
  std::vector<QQ> z;
  while (z.size() < n) {
    QQ c(random_rational(rng, 12, 5));
    if (std::find(z.begin(), z.end(), c) == z.end()) z.push_back(c);
  }
  return z;
}

std::vector<QQ> random_gaussian_points(std::mt19937_64& rng, std::size_t n) {
  std::vector<QQ> z;
  while (z.size() < n) {
    QQ c(random_rational(rng, 12, 5), random_rational(rng, 6, 4));
    if (std::find(z.begin(), z.end(), c) == z.end()) z.push_back(c);
  }
  return z;
}

std::vector<Complex> to_complex(const std::vector<QQ>& z) {
  std::vector<Complex> out;
  for (const auto& x : z) out.push_back(x.to_complex());
  return out;
}

std::string weights_str(const std::vector<int>& w) {
  std::string s = "(";
  for (std::size_t k = 0; k < w.size(); ++k) s += (k ? "," : "") + std::to_string(w[k]);
  return s + ")";
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

AlgebraElement combo(const LieAlgebraData& alg, const std::vector<std::string>& labels) {
  auto x = alg.zero();
  for (const auto& l : labels) x[alg.index_of(l)] += 1;
  return x;
}

const std::vector<std::vector<int>> cyclic_catalog{{1, 1}, {1, 1, 1}, {1, 1, 1, 1}, {2, 2}, {2, 1, 1}};

// 1 -------------------------------------------------------------------------

Verdict exact_commutativity() {
  Verdict v;
  auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::size_t families = 0, pairs = 0;
  auto check = [&](const Algebra& alg, const TensorSpace& t, const std::vector<QQ>& z, const AlgebraElement& mu,
                   const std::string& tag) {
    GaudinParams<QQ> p(alg, z, mu);
    auto gens = generator_set(p, t, alg->n == 2);
    ++families;
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = a + 1; b < gens.size(); ++b) {
        ++pairs;
        v.require(commutator(gens.ops[a], gens.ops[b]).is_zero(), tag + " [" + gens.labels[a] + "," + gens.labels[b] + "]");
      }
  };

  auto sl2 = build_algebra("sl2");
  std::vector<std::pair<std::string, AlgebraElement>> mus2{{"0", sl2->zero()},
                                                           {"h", combo(*sl2, {"h"})},
                                                           {"h+e+f", combo(*sl2, {"h", "e", "f"})},
                                                           {"f", combo(*sl2, {"f"})}};
  std::uniform_int_distribution<int> weight(1, 3);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int cfg = 0; cfg < 5; ++cfg) {
      std::vector<int> w(n);
      for (auto& l : w) l = weight(rng);
      if (n == 4 && cfg == 0) w.assign(4, 3);
      auto t = sl2_tensor_space(sl2, w);
      auto z = cfg % 2 ? random_gaussian_points(rng, n) : random_real_points(rng, n);
      for (const auto& [name, mu] : mus2) check(sl2, t, z, mu, "sl2 " + weights_str(w) + " mu=" + name);
    }

  auto sl3 = build_algebra("sl3");
  std::vector<std::pair<std::string, AlgebraElement>> mus3{{"0", sl3->zero()},
                                                           {"H1", combo(*sl3, {"H1"})},
                                                           {"H1+E12+E21", combo(*sl3, {"H1", "E12", "E21"})},
                                                           {"E21", combo(*sl3, {"E21"})}};
  for (std::size_t n = 2; n <= 3; ++n) {
    auto t = defining_tensor_space(sl3, n);
    for (int cfg = 0; cfg < 5; ++cfg) {
      auto z = cfg % 2 ? random_gaussian_points(rng, n) : random_real_points(rng, n);
      for (const auto& [name, mu] : mus3) check(sl3, t, z, mu, "sl3 N=" + std::to_string(n) + " mu=" + name);
    }
  }
  double secs = seconds_since(t0);
  v.require(secs <= commute_budget_s, "runtime " + num(secs) + " s over " + num(commute_budget_s) + " s");
  v.detail << families << " generator sets, " << pairs << " commutators exactly zero, " << num(secs) << " s";
  return v;
}

// 2 -------------------------------------------------------------------------

Verdict affine_semiinvariance() {
  Verdict v;
  auto alg = build_algebra("sl2");
  std::mt19937_64 rng(202);
  auto t = sl2_tensor_space(alg, {1, 2, 1});
  std::size_t checks = 0;
  for (int trial = 0; trial < 3; ++trial) {
    Rational a;
    do a = random_rational(rng, 7, 4);
    while (sgn(a) == 0);
    QQ b(random_rational(rng, 7, 4));
    auto z = random_real_points(rng, 3);
    std::vector<QQ> moved;
    for (const auto& x : z) moved.push_back(QQ(a) * x + b);
    for (const auto& [name, mu] : std::vector<std::pair<std::string, AlgebraElement>>{
             {"0", alg->zero()}, {"h", combo(*alg, {"h"})}, {"h+e+f", combo(*alg, {"h", "e", "f"})}}) {
      AlgebraElement amu = mu;
      for (auto& c : amu) c *= a;
      for (std::size_t i = 1; i <= 3; ++i) {
        auto lhs = inhomogeneous_hamiltonian_element(GaudinParams<QQ>(alg, moved, mu), i);
        auto rhs = inhomogeneous_hamiltonian_element(GaudinParams<QQ>(alg, z, amu), i) * QQ(Rational(1 / a));
        v.require(lhs == rhs, "element H_" + std::to_string(i) + " mu=" + name + " a=" + a.get_str());
        auto lm = inhomogeneous_hamiltonian(i, GaudinParams<QQ>(alg, moved, mu), t);
        auto rm = inhomogeneous_hamiltonian(i, GaudinParams<QQ>(alg, z, amu), t) * QQ(Rational(1 / a));
        v.require(lm == rm, "matrix H_" + std::to_string(i) + " mu=" + name + " a=" + a.get_str());
        checks += 2;
      }
    }
  }
  v.detail << checks << " exact identities H(az+b; mu) = a^-1 H(z; a mu), 3 random (a,b)";
  return v;
}

// 3 -------------------------------------------------------------------------

Verdict cyclicity_of_singular_space() {
  Verdict v;
  auto t0 = Clock::now();
  auto alg = build_algebra("sl2");
  std::mt19937_64 rng(303);
  std::size_t runs = 0, min_attained = cyclic_trials;
  for (const auto& w : cyclic_catalog) {
    auto t = sl2_tensor_space(alg, w);
    auto sing = singular_subspace(t);
    for (int cfg = 0; cfg < 5; ++cfg) {
      GaudinParams<QQ> p(alg, random_real_points(rng, w.size()));
      auto rep = is_cyclic(generator_set(p, t), sing, cyclic_trials, 1000 + static_cast<std::uint64_t>(runs));
      ++runs;
      min_attained = std::min(min_attained, rep.attained_max);
      v.require(rep.verdict && rep.max_achieved() == sing.dim(), weights_str(w) + " closure " +
                                                                     std::to_string(rep.max_achieved()) + " of " +
                                                                     std::to_string(sing.dim()));
      v.require(rep.attained_max >= cyclic_required, weights_str(w) + " only " + std::to_string(rep.attained_max) +
                                                         " seeds reach the maximum");
    }
  }
  double secs = seconds_since(t0);
  v.require(secs <= cyclic_budget_s, "runtime " + num(secs) + " s over " + num(cyclic_budget_s) + " s");
  v.detail << runs << " configurations cyclic on V^sing, worst " << min_attained << "/" << cyclic_trials
           << " seeds at the maximum, " << num(secs) << " s";
  return v;
}

// 4 and 5 share the diagonalizations --------------------------------------------

struct CatalogSpectra {
  std::vector<std::string> tags;
  std::vector<JointSpectrum> spectra;
  std::vector<double> hermitian;
  std::vector<std::vector<Complex>> points;
  std::vector<std::vector<int>> weights;
};

const CatalogSpectra& catalog_spectra() {
  static const CatalogSpectra data = [] {
    CatalogSpectra d;
    auto alg = build_algebra("sl2");
    std::mt19937_64 rng(404);
    SpectralTolerances tol;
    tol.hermitian = hermitian_tol;
    for (const auto& w : cyclic_catalog) {
      auto t = sl2_tensor_space(alg, w);
      auto sing = singular_subspace(t).convert<Complex>();
      auto gram = subspace_gram(t, sing);
      for (int cfg = 0; cfg < 5; ++cfg) {
        auto z = to_complex(random_real_points(rng, w.size()));
        auto gens = generator_set(GaudinParams<Complex>(alg, z), t).restricted(sing);
        double worst = 0.0;
        for (const auto& op : gens.ops) worst = std::max(worst, hermitian_check(op.to_dense(), gram));
        d.tags.push_back(weights_str(w) + "#" + std::to_string(cfg));
        d.hermitian.push_back(worst);
        d.spectra.push_back(joint_diagonalize(gens, gram, tol));
        d.points.push_back(z);
        d.weights.push_back(w);
      }
    }
    return d;
  }();
  return data;
}

Verdict simple_spectrum_real() {
  Verdict v;
  const auto& d = catalog_spectra();
  double min_gap = std::numeric_limits<double>::infinity(), worst_herm = 0.0;
  for (std::size_t k = 0; k < d.spectra.size(); ++k) {
    auto s = simple_spectrum(d.spectra[k]);
    min_gap = std::min(min_gap, s.min_gap);
    worst_herm = std::max(worst_herm, d.hermitian[k]);
    v.require(s.simple && s.min_gap >= gap_floor, d.tags[k] + " gap " + num(s.min_gap));
    v.require(d.hermitian[k] <= hermitian_tol, d.tags[k] + " hermitian residual " + num(d.hermitian[k]));
  }
  v.detail << d.spectra.size() << " configurations, min gap " << num(min_gap) << " (floor " << num(gap_floor)
           << "), worst Hermitian residual " << num(worst_herm);
  return v;
}

Verdict eigen_opers_monodromy_free() {
  Verdict v;
  const auto& d = catalog_spectra();
  auto cal = calibrate(*build_algebra("sl2"));
  std::size_t opers = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < d.spectra.size(); ++k)
    for (const auto& chi : genfn_eigenvalues(d.spectra[k], d.points[k].size())) {
      ++opers;
      auto op = oper_from_eigenvalue(chi, d.points[k], d.weights[k], cal);
      v.require(residue_check(op, d.weights[k]), d.tags[k] + " residues");
      for (std::size_t i = 0; i < op.N(); ++i) {
        auto ob = frobenius_obstruction(op, i);
        worst = std::max(worst, ob.relative);
        v.require(ob.relative <= obstruction_tol, d.tags[k] + " obstruction " + num(ob.relative) + " at z" +
                                                      std::to_string(i + 1));
      }
    }
  v.detail << opers << " eigen-opers, residues exact, worst obstruction " << num(worst);
  return v;
}

// 6 -------------------------------------------------------------------------

Verdict bijection_counts() {
  Verdict v;
  auto alg = build_algebra("sl2");
  std::mt19937_64 rng(606);
  // totals from brute-force diagonalization, frozen
  const std::vector<std::pair<std::vector<int>, std::size_t>> cases{{{1, 1}, 2}, {{1, 1, 1, 1}, 6}, {{2, 2}, 3}};
  std::string tallies;
  for (const auto& [w, total] : cases)
    for (int cfg = 0; cfg < 3; ++cfg) {
      auto z = to_complex(random_real_points(rng, w.size()));
      BijectionOptions opt;
      opt.bethe.seed = 7 + static_cast<std::uint64_t>(cfg);
      auto rep = count_bijection(alg, z, w, opt);
      std::string tag = weights_str(w) + "#" + std::to_string(cfg);
      for (const auto& s : rep.sectors) {
        v.require(!s.incomplete, tag + " nu=" + std::to_string(s.nu) + " incomplete search");
        v.require(s.ok(), tag + " nu=" + std::to_string(s.nu) + " eigen " + std::to_string(s.eigen_count) + " bethe " +
                              std::to_string(s.bethe_count) + " matched " + std::to_string(s.matched));
      }
      v.require(rep.eigen_total == total && rep.bethe_total == total,
                tag + " totals " + std::to_string(rep.eigen_total) + "/" + std::to_string(rep.bethe_total));
      v.require(rep.verdict, tag + " verdict");
      if (cfg == 0) tallies += (tallies.empty() ? "" : ", ") + weights_str(w) + " " + std::to_string(rep.bethe_total);
    }
  v.detail << "per-sector eigen = Bethe at 3 configurations each; totals " << tallies;
  return v;
}

// 7 -------------------------------------------------------------------------

Verdict oper_dimensions() {
  Verdict v;
  auto alg = build_algebra("sl2");
  for (long n = 2; n <= 6; ++n) {
    auto reg = oper_space_dimension(*alg, n, false), irr = oper_space_dimension(*alg, n, true);
    v.require(reg.formula == 2 * (n - 1) + 1 && reg.independent && *reg.independent == reg.formula,
              "regular N=" + std::to_string(n));
    v.require(irr.formula == 2 * n && irr.independent && *irr.independent == irr.formula,
              "irregular N=" + std::to_string(n));
  }
  v.detail << "regular 2(N-1)+1 and irregular 2N agree with the constraint count for N = 2..6";
  return v;
}

// 8 -------------------------------------------------------------------------

Verdict inhomogeneous_cyclicity() {
  Verdict v;
  auto alg = build_algebra("sl2");
  std::mt19937_64 rng(808);
  auto mu = combo(*alg, {"h"});
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t runs = 0;
  for (const auto& w : std::vector<std::vector<int>>{{1, 1}, {1, 1, 1}})
    for (int cfg = 0; cfg < 5; ++cfg) {
      auto t = sl2_tensor_space(alg, w);
      auto zq = random_real_points(rng, w.size());
      std::string tag = weights_str(w) + "#" + std::to_string(cfg);
      auto rep = is_cyclic(generator_set(GaudinParams<QQ>(alg, zq, mu), t), Subspace<QQ>::whole(t.dim()), cyclic_trials,
                           2000 + runs);
      v.require(rep.verdict && rep.attained_max >= cyclic_required, tag + " full space not cyclic");
      auto gens = generator_set(GaudinParams<Complex>(alg, to_complex(zq), mu), t);
      auto spec = joint_diagonalize(gens, t.gram());
      auto s = simple_spectrum(spec);
      min_gap = std::min(min_gap, s.min_gap);
      v.require(s.simple && s.min_gap >= gap_floor, tag + " gap " + num(s.min_gap));
      ++runs;
    }
  v.detail << runs << " configurations with mu = h: full space cyclic, min gap " << num(min_gap);
  return v;
}

// 9 -------------------------------------------------------------------------

Verdict degeneration() {
  Verdict v;
  auto alg = build_algebra("sl2");
  auto t = sl2_tensor_space(alg, {1, 2, 1});
  std::mt19937_64 rng(909);
  auto z = random_real_points(rng, 3);
  auto f = combo(*alg, {"f"});
  for (const auto& s : {Rational(1), Rational(1, 3), Rational(-5, 7)}) {
    AlgebraElement sf = f;
    for (auto& c : sf) c *= s;
    for (std::size_t i = 1; i <= 3; ++i) {
      auto diff = (inhomogeneous_hamiltonian_element(GaudinParams<QQ>(alg, z, sf), i) -
                   hamiltonian_element(GaudinParams<QQ>(alg, z), i)) *
                  QQ(Rational(1 / s));
      v.require(diff == Element<QQ>::embed(3, f, i), "s^-1(H^sf - H) at i=" + std::to_string(i));
    }
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    auto hf = inhomogeneous_hamiltonian(i, GaudinParams<QQ>(alg, z, f), t);
    auto d = filtration_degree(hf, t);
    v.require(d.min_degree == -1 && d.max_degree == 0, "filtration degrees of H^f_" + std::to_string(i));
    v.require(d.leading == quadratic_hamiltonian(i, GaudinParams<QQ>(alg, z), t), "leading term of H^f_" + std::to_string(i));
  }
  double worst_dev = 0.0, worst_ratio = 0.0;
  std::size_t trees = 0;
  for (const auto& tree : boundary_trees(3)) {
    if (tree.height() < 2) continue;
    auto rep = collision_limit_check(tree, sl2_tensor_space(alg, {1, 1, 1}), collision_s);
    worst_dev = std::max(worst_dev, rep.deviation);
    worst_ratio = std::max(worst_ratio, rep.ratio);
    v.require(rep.passes(collision_deviation_tol, collision_ratio_tol), tree.str() + " deviation " + num(rep.deviation) +
                                                                            " ratio " + num(rep.ratio));
    ++trees;
  }
  v.detail << "f-shift and filtration exact; " << trees << " N=3 collisions at s=" << num(collision_s)
           << ": deviation " << num(worst_dev) << ", ratio " << num(worst_ratio);
  return v;
}

// 10 ------------------------------------------------------------------------

Verdict limit_algebras() {
  Verdict v;
  auto alg = build_algebra("sl2");
  std::size_t count = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t n : {3u, 4u}) {
    auto trees = boundary_trees(n);
    auto reps = limit_catalog_suite(trees, alg, std::vector<int>(n, 1), cyclic_trials, 3000 + n);
    for (const auto& r : reps) {
      ++count;
      v.require(r.error.empty(), r.tree + ": " + r.error);
      v.require(r.commutative, r.tree + " not commutative");
      v.require(r.cyclic.verdict, r.tree + " not cyclic");
      v.require(r.simple.simple && r.simple.min_gap >= gap_floor, r.tree + " gap " + num(r.simple.min_gap));
      min_gap = std::min(min_gap, r.simple.min_gap);
    }
  }
  v.detail << count << " boundary trees (N = 3, 4): exactly commutative, cyclic, min gap " << num(min_gap);
  return v;
}

// 11 ------------------------------------------------------------------------

Verdict covering_monodromy() {
  Verdict v;
  auto t0 = Clock::now();
  auto alg = build_algebra("sl2");
  std::size_t loops = 0, composed = 0, doubled = 0;
  for (std::size_t n : {3u, 4u}) {
    std::vector<int> w(n, 1);
    auto cat = cactus_catalog(n);
    auto rs = cactus_loop_suite(n, alg, w, cat);
    for (const auto& r : rs) {
      ++loops;
      v.require(r.ok(), "N=" + std::to_string(n) + " " + r.loop.name + ": " + (r.error.empty() ? "step halving changed the permutation" : r.error));
    }
    std::vector<CactusLoop> pairs, twice;
    std::vector<std::vector<std::size_t>> expect;
    for (std::size_t a = 0; a < cat.size(); ++a) {
      for (std::size_t b = 0; b < cat.size(); ++b) {
        pairs.push_back(concatenate(cat[a], cat[b], n));
        expect.push_back(compose(rs[b].result.permutation, rs[a].result.permutation));
      }
      if (is_identity(compose(rs[a].result.permutation, rs[a].result.permutation)))
        twice.push_back(concatenate(cat[a], cat[a], n));
    }
    auto cs = cactus_loop_suite(n, alg, w, pairs);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      ++composed;
      v.require(cs[k].ok() && cs[k].result.permutation == expect[k], "N=" + std::to_string(n) + " " + pairs[k].name +
                                                                         " does not compose");
    }
    for (const auto& r : cactus_loop_suite(n, alg, w, twice)) {
      ++doubled;
      v.require(r.ok() && is_identity(r.result.permutation), "N=" + std::to_string(n) + " " + r.loop.name + " not identity");
    }
  }
  double secs = seconds_since(t0);
  v.require(secs <= cover_budget_s, "runtime " + num(secs) + " s over " + num(cover_budget_s) + " s");
  v.detail << loops << " catalog loops step-robust, " << composed << " concatenations compose, " << doubled
           << " doubled involutions trivial, " << num(secs) << " s";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"exact commutativity", exact_commutativity},
      {"affine semiinvariance", affine_semiinvariance},
      {"cyclicity of V^sing", cyclicity_of_singular_space},
      {"simple spectrum, real parameters", simple_spectrum_real},
      {"eigen-opers monodromy-free", eigen_opers_monodromy_free},
      {"eigenvalue/Bethe bijection counts", bijection_counts},
      {"oper space dimension", oper_dimensions},
      {"inhomogeneous cyclicity", inhomogeneous_cyclicity},
      {"degeneration and collision limit", degeneration},
      {"limit algebras", limit_algebras},
      {"covering monodromy", covering_monodromy},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << k + 1 << " " << (v.ok ? "PASS" : "FAIL") << " " << criteria[k].first << ": "
              << v.detail.str();
    for (const auto& f : v.failures) std::cout << " | " << f;
    std::cout << " [" << num(seconds_since(t0)) << " s]" << std::endl;
    if (!v.ok) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
