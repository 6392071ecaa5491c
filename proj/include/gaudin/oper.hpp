#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gaudin/gaudin.hpp"
#include "gaudin/spectral.hpp"
#include "gaudin/tensor_space.hpp"

namespace gaudin {

/// d^2/dt^2 - T(t) with
///   T(t) = sum_i a_i/(t-z_i)^2 + c_i/(t-z_i) + kappa.
/// kappa is nonzero only for twisted (irregular at infinity) opers.
struct Sl2Oper {
  std::vector<Complex> z;
  std::vector<int> weights;
  std::vector<Rational> a;  // second-order residues, exact
  std::vector<Complex> c;   // accessory parameters
  Complex kappa{0.0, 0.0};

  std::size_t N() const { return z.size(); }

  Complex operator()(Complex t) const {
    Complex s = kappa;
    for (std::size_t i = 0; i < N(); ++i) {
      Complex r = 1.0 / (t - z[i]);
      s += a[i].get_d() * r * r + c[i] * r;
    }
    return s;
  }

  Complex accessory_sum() const {
    Complex s{};
    for (const auto& x : c) s += x;
    return s;
  }

  /// Coefficients of x^{-2} T(1/x) around x = 0, i.e. x^2 times the
  /// potential of the transformed equation Y'' = x^{-4} T(1/x) Y.
  /// mag[n] sums the magnitudes of the contributions to p[n].
  struct Series {
    std::vector<Complex> p;
    std::vector<double> mag;
  };

  Series infinity_series(std::size_t order) const {
    Series s{std::vector<Complex>(order + 1), std::vector<double>(order + 1, 0.0)};
    for (std::size_t n = 0; n <= order; ++n)
      for (std::size_t i = 0; i < N(); ++i) {
        Complex zn = std::pow(z[i], static_cast<double>(n));
        Complex u = a[i].get_d() * static_cast<double>(n + 1) * zn, v = c[i] * zn * z[i];
        s.p[n] += u + v;
        s.mag[n] += std::abs(u) + std::abs(v);
      }
    return s;
  }
};

inline Rational residue_for_weight(int lambda) {
  Rational l(lambda, 2);
  l.canonicalize();
  return Rational(l * (l + 1));
}

/// Affine dimension of the sl2-type oper space with N regular points, and
/// an independent count: free parameters (a_i, c_i) minus the rank of the
/// linear conditions at infinity.
struct OperDimension {
  long formula = 0;
  std::optional<long> independent;
  bool agree = true;
};

inline OperDimension oper_space_dimension(const LieAlgebraData& alg, long N, bool irregular) {
  if (N < 1) throw Error("oper_space_dimension needs N >= 1");
  const long dim = static_cast<long>(alg.dim()), rk = alg.rank();
  OperDimension d;
  d.formula = irregular ? (dim + rk) * N / 2 : (dim + rk) * (N - 1) / 2 + rk;
  if (alg.n == 2) {
    // constraint rows on (a_1..a_N, c_1..c_N): the t^{-1} coefficient at
    // infinity, sum_i c_i, must vanish in the regular case
    Dense<QQ> rows(irregular ? 0 : 1, static_cast<std::size_t>(2 * N));
    if (!irregular)
      for (long i = 0; i < N; ++i) rows(0, static_cast<std::size_t>(N + i)) = QQ(1L);
    d.independent = 2 * N - static_cast<long>(rank(rows));
    d.agree = *d.independent == d.formula;
  }
  return d;
}

/// a = alpha * chi(C) + beta, c = alpha * chi(S^{i,1}); fixed once per
/// invariant form from the Casimir scalars of V_1 and V_2.
struct OperCalibration {
  Rational alpha, beta;
};

inline OperCalibration calibrate(const LieAlgebraData& alg) {
  if (alg.n != 2) throw Error("oper calibration requires sl2");
  Rational c1 = casimir_scalar(alg, sl2_module(alg, 1)), c2 = casimir_scalar(alg, sl2_module(alg, 2));
  Rational a1 = residue_for_weight(1), a2 = residue_for_weight(2);
  if (c1 == c2) throw Error("calibration failure: degenerate Casimir values");
  OperCalibration cal;
  cal.alpha = (a2 - a1) / (c2 - c1);
  cal.beta = a1 - cal.alpha * c1;
  for (int l = 0; l <= 6; ++l) {
    Rational cl = casimir_scalar(alg, sl2_module(alg, l));
    if (cal.alpha * cl + cal.beta != residue_for_weight(l))
      throw Error("calibration failure: no affine normalization matches weight " + std::to_string(l));
  }
  return cal;
}

/// Joint eigenvalue of the generating function: per point, the eigenvalues
/// of S^{i,1} and S^{i,2}, plus the constant term B(mu, mu).
struct GenFnEigenvalue {
  std::vector<Complex> s1, s2;
  Complex constant{0.0, 0.0};
};

/// Reads S^{i,1}, S^{i,2} eigenvalues out of a joint spectrum by label.
inline std::vector<GenFnEigenvalue> genfn_eigenvalues(const JointSpectrum& spec, std::size_t N,
                                                      Complex constant = {0.0, 0.0}) {
  std::vector<std::size_t> i1(N, SIZE_MAX), i2(N, SIZE_MAX);
  for (std::size_t k = 0; k < spec.labels.size(); ++k)
    for (std::size_t i = 0; i < N; ++i) {
      if (spec.labels[k] == "S^{" + std::to_string(i + 1) + ",1}") i1[i] = k;
      if (spec.labels[k] == "S^{" + std::to_string(i + 1) + ",2}") i2[i] = k;
    }
  for (std::size_t i = 0; i < N; ++i)
    if (i1[i] == SIZE_MAX || i2[i] == SIZE_MAX) throw Error("spectrum lacks S^{i,1} or S^{i,2} for some point");
  std::vector<GenFnEigenvalue> out;
  for (const auto& sp : spec.spaces) {
    GenFnEigenvalue e;
    e.constant = constant;
    for (std::size_t i = 0; i < N; ++i) {
      e.s1.push_back(sp.values[i1[i]]);
      e.s2.push_back(sp.values[i2[i]]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline Sl2Oper oper_from_eigenvalue(const GenFnEigenvalue& chi, const std::vector<Complex>& z,
                                    const std::vector<int>& weights, const OperCalibration& cal,
                                    double tol = 1e-8) {
  if (chi.s1.size() != z.size() || chi.s2.size() != z.size() || weights.size() != z.size())
    throw Error("oper_from_eigenvalue: inconsistent number of points");
  Sl2Oper op;
  op.z = z;
  op.weights = weights;
  const double alpha = cal.alpha.get_d(), beta = cal.beta.get_d();
  for (std::size_t i = 0; i < z.size(); ++i) {
    Rational want = residue_for_weight(weights[i]);
    Complex got = alpha * chi.s2[i] + beta;
    if (std::abs(got - want.get_d()) > tol * std::max(1.0, std::abs(want.get_d())))
      throw Error("calibration failure at z" + std::to_string(i + 1) + ": second-order residue " + to_string(got) +
                  " but weight " + std::to_string(weights[i]) + " requires " + want.get_str());
    op.a.push_back(want);
    op.c.push_back(alpha * chi.s1[i]);
  }
  op.kappa = alpha * chi.constant;
  return op;
}

/// Indicial roots r(r-1) = a_i must be {-lambda_i/2, lambda_i/2 + 1}; exact.
inline bool residue_check(const Sl2Oper& op, const std::vector<int>& weights) {
  if (weights.size() != op.N()) return false;
  for (std::size_t i = 0; i < op.N(); ++i) {
    if (weights[i] < 0) return false;
    Rational r1(-weights[i], 2), r2(weights[i] + 2, 2);
    r1.canonicalize();
    r2.canonicalize();
    if (r1 * (r1 - 1) != op.a[i] || r2 * (r2 - 1) != op.a[i]) return false;
  }
  return true;
}

struct Obstruction {
  Complex raw{};        // resonance coefficient with y_0 = 1
  Complex polynomial{};  // raw times the product of the nonzero pivots
  double scale = 0.0;    // sum of |p_j y_{lambda+1-j}|
  double relative = 0.0;

  bool passes(double tol) const { return relative <= tol; }
};

/// Frobenius recursion for x^2 y'' = P(x) y, P = sum p_j x^j, from the smaller
/// indicial root -lambda/2 (p_0 = (lambda/2)(lambda/2+1)). Pivots are
/// k(k - lambda - 1); the obstruction is the right-hand side at k = lambda + 1.
/// `mag` (optional) bounds the size of each p_j before cancellation and sets
/// the scale of the relative value.
inline Obstruction frobenius_from_series(const std::vector<Complex>& p, int lambda,
                                         const std::vector<double>& mag = {}) {
  if (lambda < 0) throw Error("negative weight in Frobenius recursion");
  const std::size_t top = static_cast<std::size_t>(lambda) + 1;
  if (p.size() <= top) throw Error("series too short for the Frobenius recursion");
  auto size_of = [&](std::size_t j) { return j < mag.size() ? std::max(mag[j], std::abs(p[j])) : std::abs(p[j]); };
  std::vector<Complex> y(top + 1);
  std::vector<double> ymag(top + 1);
  y[0] = 1.0;
  ymag[0] = 1.0;
  double pivot_product = 1.0;
  for (std::size_t k = 1; k < top; ++k) {
    double pivot = static_cast<double>(k) * (static_cast<double>(k) - lambda - 1);
    if (pivot == 0.0) throw Error("unexpected zero pivot before the resonance order");
    Complex rhs{};
    double rmag = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      rhs += p[j] * y[k - j];
      rmag += size_of(j) * ymag[k - j];
    }
    y[k] = rhs / pivot;
    ymag[k] = rmag / std::abs(pivot);
    pivot_product *= pivot;
  }
  Obstruction ob;
  for (std::size_t j = 1; j <= top; ++j) {
    ob.raw += p[j] * y[top - j];
    ob.scale += size_of(j) * ymag[top - j];
  }
  ob.polynomial = ob.raw * pivot_product;
  ob.relative = ob.scale > 0.0 ? std::abs(ob.raw) / ob.scale : 0.0;
  return ob;
}

/// Series of x^2 T(z_i + x) about the singular point z_i, with magnitudes.
inline Sl2Oper::Series local_series(const Sl2Oper& op, std::size_t i, std::size_t order) {
  Sl2Oper::Series s{std::vector<Complex>(order + 1), std::vector<double>(order + 1, 0.0)};
  auto add = [&](std::size_t n, Complex v) {
    s.p[n] += v;
    s.mag[n] += std::abs(v);
  };
  add(0, op.a[i].get_d());
  if (order >= 1) add(1, op.c[i]);
  if (order >= 2) add(2, op.kappa);
  for (std::size_t k = 0; k < op.N(); ++k) {
    if (k == i) continue;
    Complex d = op.z[i] - op.z[k];
    double ak = op.a[k].get_d();
    for (std::size_t n = 0; n + 2 <= order; ++n) {
      double sign = n % 2 == 0 ? 1.0 : -1.0;
      Complex dn1 = std::pow(d, static_cast<double>(n + 1));
      add(n + 2, sign * ak * static_cast<double>(n + 1) / (dn1 * d));
      add(n + 2, sign * op.c[k] / dn1);
    }
  }
  return s;
}

/// point_index is 0-based.
inline Obstruction frobenius_obstruction(const Sl2Oper& op, std::size_t point_index) {
  if (point_index >= op.N()) throw Error("point index out of range");
  int l = op.weights[point_index];
  auto s = local_series(op, point_index, static_cast<std::size_t>(l) + 1);
  return frobenius_from_series(s.p, l, s.mag);
}

/// Behaviour at infinity (regular opers only): the local weight solves
/// r(r-1) = A_inf and the obstruction is run when it is a nonnegative integer.
struct InfinityReport {
  Complex exponent_weight{};  // lambda_inf = -1 + sqrt(1 + 4 A_inf)
  bool integral = false;
  int weight = -1;
  Obstruction obstruction;
  bool trivial = false;
};

inline InfinityReport infinity_obstruction(const Sl2Oper& op, double tol = 1e-10) {
  InfinityReport rep;
  if (std::abs(op.kappa) > 0.0) throw Error("infinity is an irregular point for twisted opers");
  double scale = 0.0;
  for (const auto& c : op.c) scale = std::max(scale, std::abs(c));
  if (std::abs(op.accessory_sum()) > 1e-8 * std::max(1.0, scale)) return rep;  // simple pole left at infinity
  rep.exponent_weight = -1.0 + std::sqrt(1.0 + 4.0 * op.infinity_series(0).p[0]);
  double nearest = std::round(rep.exponent_weight.real());
  rep.integral = nearest >= 0 && std::abs(rep.exponent_weight - nearest) <= 1e-6;
  if (!rep.integral) return rep;
  rep.weight = static_cast<int>(nearest);
  auto s = op.infinity_series(static_cast<std::size_t>(rep.weight) + 1);
  s.p[0] = residue_for_weight(rep.weight).get_d();
  rep.obstruction = frobenius_from_series(s.p, rep.weight, s.mag);
  rep.trivial = rep.obstruction.passes(tol);
  return rep;
}

struct MonodromyReport {
  std::vector<Obstruction> points;
  std::vector<bool> pass;
  bool verdict = true;
  std::optional<InfinityReport> infinity;
};

inline MonodromyReport monodromy_report(const Sl2Oper& op, double tol = 1e-10, bool check_infinity = false) {
  MonodromyReport rep;
  for (std::size_t i = 0; i < op.N(); ++i) {
    rep.points.push_back(frobenius_obstruction(op, i));
    rep.pass.push_back(rep.points.back().passes(tol));
    rep.verdict = rep.verdict && rep.pass.back();
  }
  if (check_infinity && std::abs(op.kappa) == 0.0) rep.infinity = infinity_obstruction(op, tol);
  return rep;
}

// ---------------------------------------------------------------------------
// Bethe ansatz

struct BetheConfig {
  std::vector<Complex> roots;
  int nu = 0;  // sum lambda_i - 2m
  double residual = 0.0;
};

inline std::vector<Complex> bethe_residual(const std::vector<Complex>& w, const std::vector<Complex>& z,
                                           const std::vector<int>& weights) {
  std::vector<Complex> r(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      Complex d = w[j] - z[i];
      if (std::abs(d) == 0.0) throw Error("Bethe root collides with z" + std::to_string(i + 1));
      r[j] += static_cast<double>(weights[i]) / d;
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (k == j) continue;
      Complex d = w[j] - w[k];
      if (std::abs(d) == 0.0) throw Error("coincident Bethe roots");
      r[j] -= 2.0 / d;
    }
  }
  return r;
}

inline Eigen::MatrixXcd bethe_jacobian(const std::vector<Complex>& w, const std::vector<Complex>& z,
                                       const std::vector<int>& weights) {
  const auto m = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < z.size(); ++i) {
      Complex d = w[uj] - z[i];
      J(j, j) -= static_cast<double>(weights[i]) / (d * d);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == j) continue;
      Complex d = w[uj] - w[static_cast<std::size_t>(k)];
      Complex v = 2.0 / (d * d);
      J(j, j) += v;
      J(j, k) -= v;
    }
  }
  return J;
}

/// Elementary symmetric polynomials: permutation-invariant coordinates of a root set.
inline std::vector<Complex> elementary_symmetric(const std::vector<Complex>& w) {
  std::vector<Complex> e(w.size() + 1);
  e[0] = 1.0;
  for (const auto& x : w)
    for (std::size_t k = w.size(); k >= 1; --k) e[k] += e[k - 1] * x;
  return std::vector<Complex>(e.begin() + 1, e.end());
}

struct BetheOptions {
  std::size_t starts = 200;
  std::size_t batch = 25;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double dedup_tol = 1e-7;
  double accept_tol = 1e-10;
  std::size_t max_iterations = 120;
};

namespace detail {

inline double sym_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::norm(a[k] - b[k]);
  return std::sqrt(d);
}

inline double log_deflation(const std::vector<Complex>& w, const std::vector<std::vector<Complex>>& known) {
  if (known.empty()) return 0.0;
  auto s = elementary_symmetric(w);
  double lm = 0.0;
  for (const auto& k : known) {
    double d = sym_distance(s, k);
    lm += std::log(1.0 / (d * d) + 1.0);
  }
  return lm;
}

inline double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool admissible(const std::vector<Complex>& w, const std::vector<Complex>& z) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!std::isfinite(w[j].real()) || !std::isfinite(w[j].imag()) || std::abs(w[j]) > 1e6) return false;
    for (const auto& zi : z)
      if (std::abs(w[j] - zi) < 1e-9) return false;
    for (std::size_t k = 0; k < j; ++k)
      if (std::abs(w[j] - w[k]) < 1e-9) return false;
  }
  return true;
}

/// Damped Newton on the deflated system from one start; nullopt on failure.
inline std::optional<std::vector<Complex>> newton_from(std::vector<Complex> w, const std::vector<Complex>& z,
                                                       const std::vector<int>& weights,
                                                       const std::vector<std::vector<Complex>>& known,
                                                       const BetheOptions& opt) {
  const std::size_t m = w.size();
  auto norm_of = [&](const std::vector<Complex>& x) {
    if (!admissible(x, z)) return std::numeric_limits<double>::infinity();
    auto r = bethe_residual(x, z, weights);
    double s = 0.0;
    for (const auto& v : r) s += std::norm(v);
    return std::sqrt(s) * std::exp(log_deflation(x, known));
  };
  double current = norm_of(w);
  if (!std::isfinite(current)) return std::nullopt;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    auto r = bethe_residual(w, z, weights);
    if (max_abs(r) <= opt.accept_tol * 1e-2) break;
    Eigen::VectorXcd rv(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) rv(static_cast<Eigen::Index>(j)) = r[j];
    Eigen::VectorXcd step = bethe_jacobian(w, z, weights).fullPivLu().solve(-rv);
    if (!step.allFinite()) return std::nullopt;
    if (!known.empty()) {
      // deflated step tau * delta with tau = 1 / (1 - d/de ln M(w + e delta))
      const double h = 1e-7;
      std::vector<Complex> shifted = w;
      for (std::size_t j = 0; j < m; ++j) shifted[j] += h * step(static_cast<Eigen::Index>(j));
      double dlog = (log_deflation(shifted, known) - log_deflation(w, known)) / h;
      double denom = 1.0 - dlog;
      if (std::abs(denom) > 1e-12) step /= denom;
    }
    double step_norm = step.norm();
    double spread = 1.0;
    for (const auto& zi : z) spread = std::max(spread, std::abs(zi));
    if (step_norm > spread) step *= spread / step_norm;
    double damping = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::vector<Complex> trial = w;
      for (std::size_t j = 0; j < m; ++j) trial[j] += damping * step(static_cast<Eigen::Index>(j));
      double tn = norm_of(trial);
      if (tn < current || (ls == 29 && std::isfinite(tn))) {
        w = std::move(trial);
        current = tn;
        accepted = true;
        break;
      }
      damping /= 2.0;
    }
    if (!accepted) return std::nullopt;
  }
  // undeflated polish
  for (int it = 0; it < 8; ++it) {
    if (!admissible(w, z)) return std::nullopt;
    auto r = bethe_residual(w, z, weights);
    if (max_abs(r) <= 1e-14) break;
    Eigen::VectorXcd rv(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) rv(static_cast<Eigen::Index>(j)) = r[j];
    Eigen::VectorXcd step = bethe_jacobian(w, z, weights).fullPivLu().solve(-rv);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t j = 0; j < m; ++j) w[j] += step(static_cast<Eigen::Index>(j));
  }
  if (!admissible(w, z) || max_abs(bethe_residual(w, z, weights)) > opt.accept_tol) return std::nullopt;
  return w;
}

inline std::vector<Complex> random_start(std::mt19937_64& rng, const std::vector<Complex>& z, std::size_t m,
                                         std::size_t start_index) {
  std::vector<double> xs;
  for (const auto& zi : z) xs.push_back(zi.real());
  std::sort(xs.begin(), xs.end());
  double lo = xs.front() - 1.0, hi = xs.back() + 1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Complex> w(m);
  if (start_index % 2 == 0 && xs.size() >= 2) {
    // between consecutive real points, slightly off the axis
    for (auto& x : w) {
      std::size_t gap = static_cast<std::size_t>(u(rng) * static_cast<double>(xs.size() - 1));
      gap = std::min(gap, xs.size() - 2);
      double t = 0.1 + 0.8 * u(rng);
      x = Complex(xs[gap] + t * (xs[gap + 1] - xs[gap]), 0.05 * nd(rng));
    }
  } else {
    double width = hi - lo;
    for (auto& x : w) x = Complex(lo + width * u(rng), 0.5 * width * nd(rng));
  }
  return w;
}

}  // namespace detail

/// Multistart damped Newton with deflation of roots already found. Starts run
/// in batches; within a batch they are independent (optionally threaded) and
/// share the deflation set known at the start of the batch; results are merged
/// in start order so the output does not depend on the thread count.
inline std::vector<BetheConfig> solve_bethe(const std::vector<Complex>& z, const std::vector<int>& weights,
                                            std::size_t m, const BetheOptions& opt = {}) {
  long total = 0;
  for (int l : weights) total += l;
  if (2 * static_cast<long>(m) > total) throw Error("solve_bethe: m exceeds half the total weight");
  const int nu = static_cast<int>(total - 2 * static_cast<long>(m));
  std::vector<BetheConfig> found;
  if (m == 0) {
    found.push_back(BetheConfig{{}, nu, 0.0});
    return found;
  }
  std::vector<std::vector<Complex>> known;
  std::mt19937_64 master(opt.seed);
  std::vector<std::uint64_t> seeds(opt.starts);
  for (auto& s : seeds) s = master();

  for (std::size_t b0 = 0; b0 < opt.starts; b0 += opt.batch) {
    std::size_t b1 = std::min(opt.starts, b0 + opt.batch);
    std::vector<std::optional<std::vector<Complex>>> results(b1 - b0);
    auto work = [&](std::size_t first, std::size_t stride) {
      for (std::size_t k = b0 + first; k < b1; k += stride) {
        std::mt19937_64 rng(seeds[k]);
        results[k - b0] = detail::newton_from(detail::random_start(rng, z, m, k), z, weights, known, opt);
      }
    };
    unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(b1 - b0)));
    if (nt == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
      for (auto& th : pool) th.join();
    }
    for (auto& r : results) {
      if (!r) continue;
      auto sym = elementary_symmetric(*r);
      double scale = std::max(1.0, detail::max_abs(sym));
      bool dup = std::any_of(known.begin(), known.end(),
                             [&](const auto& k) { return detail::sym_distance(sym, k) <= opt.dedup_tol * scale; });
      if (dup) continue;
      known.push_back(sym);
      std::vector<Complex> roots = *r;
      std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      found.push_back(BetheConfig{roots, nu, detail::max_abs(bethe_residual(roots, z, weights))});
    }
  }
  return found;
}

/// T = u^2 - u' with u = sum (lambda_i/2)/(t-z_i) - sum 1/(t-w_j). The double
/// poles at w_j cancel identically; the simple pole at w_j has coefficient
/// -(Bethe residual)_j and must vanish.
struct MiuraResult {
  Sl2Oper oper;
  std::vector<Complex> root_poles;  // simple-pole coefficients at the w_j
};

inline MiuraResult miura_expand(const std::vector<Complex>& w, const std::vector<Complex>& z,
                                const std::vector<int>& weights) {
  MiuraResult res;
  auto& op = res.oper;
  op.z = z;
  op.weights = weights;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double li = weights[i] / 2.0;
    Complex s{};
    for (std::size_t k = 0; k < z.size(); ++k)
      if (k != i) s += (weights[k] / 2.0) / (z[i] - z[k]);
    for (const auto& wj : w) s -= 1.0 / (z[i] - wj);
    op.a.push_back(residue_for_weight(weights[i]));
    op.c.push_back(2.0 * li * s);
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    Complex s{};
    for (std::size_t i = 0; i < z.size(); ++i) s += (weights[i] / 2.0) / (w[j] - z[i]);
    for (std::size_t k = 0; k < w.size(); ++k)
      if (k != j) s -= 1.0 / (w[j] - w[k]);
    res.root_poles.push_back(-2.0 * s);
  }
  return res;
}

inline Sl2Oper miura_oper(const BetheConfig& config, const std::vector<Complex>& z, const std::vector<int>& weights,
                          double tol = 1e-8) {
  auto res = miura_expand(config.roots, z, weights);
  for (std::size_t j = 0; j < res.root_poles.size(); ++j)
    if (std::abs(res.root_poles[j]) > tol)
      throw Error("Miura oper has a pole at w" + std::to_string(j + 1) + " (coefficient " +
                  to_string(res.root_poles[j]) + "); roots do not solve the Bethe equations");
  return res.oper;
}

/// Largest difference in accessory parameters (second-order residues agree exactly by construction).
inline double oper_distance(const Sl2Oper& a, const Sl2Oper& b) {
  if (a.N() != b.N()) return std::numeric_limits<double>::infinity();
  double d = std::abs(a.kappa - b.kappa);
  for (std::size_t i = 0; i < a.N(); ++i) {
    if (a.a[i] != b.a[i]) return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(a.c[i] - b.c[i]));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Eigenvalue / oper bijection

struct SectorCount {
  int nu = 0;
  std::size_t m = 0;
  std::size_t singular_dim = 0;
  std::size_t eigen_count = 0;   // distinct joint eigenvalue tuples on V^sing_nu
  std::size_t bethe_count = 0;   // Bethe solutions validated by Miura + obstruction
  std::size_t matched = 0;       // Bethe opers coinciding with an eigenvalue oper
  std::vector<BetheConfig> solutions;
  bool incomplete = false;       // solver found fewer than expected
  bool ok() const { return eigen_count == bethe_count && matched == bethe_count && !incomplete; }
};

struct BijectionReport {
  std::vector<SectorCount> sectors;
  std::size_t eigen_total = 0, bethe_total = 0;
  bool all_eigen_opers_monodromy_free = true;
  bool verdict = false;
};

struct BijectionOptions {
  BetheOptions bethe;
  SpectralTolerances spectral;
  double obstruction_tol = 1e-10;
  double match_tol = 1e-8;
};

/// Per weight sector nu: distinct joint eigenvalues of the homogeneous
/// generators on V^sing_nu versus monodromy-free opers from Bethe roots with
/// m = (sum lambda - nu)/2.
inline BijectionReport count_bijection(const Algebra& alg, const std::vector<Complex>& z, const std::vector<int>& weights,
                                       const BijectionOptions& opt = {}) {
  if (alg->n != 2) throw Error("count_bijection requires sl2");
  auto t = sl2_tensor_space(alg, weights);
  GaudinParams<Complex> params(alg, z);
  auto gens = generator_set(params, t);
  auto cal = calibrate(*alg);
  int total = 0;
  for (int l : weights) total += l;
  BijectionReport rep;
  for (int nu = total; nu >= 0; nu -= 2) {
    SectorCount sec;
    sec.nu = nu;
    sec.m = static_cast<std::size_t>((total - nu) / 2);
    auto sub_exact = singular_subspace_sl2(t, nu);
    sec.singular_dim = sub_exact.dim();
    std::vector<Sl2Oper> eigen_opers;
    if (sec.singular_dim > 0) {
      auto sub = sub_exact.convert<Complex>();
      auto spec = joint_diagonalize(gens.restricted(sub), subspace_gram(t, sub), opt.spectral);
      sec.eigen_count = spec.spaces.size();
      for (const auto& chi : genfn_eigenvalues(spec, z.size())) {
        eigen_opers.push_back(oper_from_eigenvalue(chi, z, weights, cal));
        if (!residue_check(eigen_opers.back(), weights) ||
            !monodromy_report(eigen_opers.back(), opt.obstruction_tol).verdict)
          rep.all_eigen_opers_monodromy_free = false;
      }
    }
    auto sols = solve_bethe(z, weights, sec.m, opt.bethe);
    for (auto& s : sols) {
      Sl2Oper op;
      try {
        op = miura_oper(s, z, weights);
      } catch (const Error&) {
        continue;
      }
      if (!residue_check(op, weights) || !monodromy_report(op, opt.obstruction_tol).verdict) continue;
      ++sec.bethe_count;
      for (const auto& e : eigen_opers)
        if (oper_distance(op, e) <= opt.match_tol) {
          ++sec.matched;
          break;
        }
      sec.solutions.push_back(std::move(s));
    }
    sec.incomplete = sec.bethe_count < sec.eigen_count;
    rep.eigen_total += sec.eigen_count;
    rep.bethe_total += sec.bethe_count;
    rep.sectors.push_back(std::move(sec));
  }
  rep.verdict = rep.all_eigen_opers_monodromy_free &&
                std::all_of(rep.sectors.begin(), rep.sectors.end(), [](const SectorCount& s) { return s.ok(); });
  return rep;
}

}  // namespace gaudin
