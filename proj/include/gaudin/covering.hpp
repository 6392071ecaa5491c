#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaudin/operad.hpp"
#include "gaudin/spectral.hpp"

namespace gaudin {

struct StepControl {
  double initial = 0.05;
  double min = 1e-6;
  double max = 0.1;
  double gap_floor = 1e-8;
  double accept = 0.9;  // overlap needed to match an eigenline across a step
  double join = 0.99;   // overlap needed where generator sets switch
};

/// One piece of a real path, parameterized by u in [0,1]. A linear piece
/// interpolates configurations and uses the ordinary generators; a chart piece
/// moves the scale parameter of a boundary tree and uses its rescaled family,
/// which stays regular when the parameter crosses 0.
struct PathSegment {
  enum class Kind { linear, chart };
  Kind kind = Kind::linear;
  std::vector<Rational> from, to;
  std::optional<OperadTree> tree;
  Rational eps_from, eps_to;

  static PathSegment line(std::vector<Rational> a, std::vector<Rational> b) {
    if (a.size() != b.size()) throw Error("path segment endpoints differ in length");
    PathSegment s;
    s.from = std::move(a);
    s.to = std::move(b);
    return s;
  }

  static PathSegment chart(OperadTree t, Rational e0, Rational e1) {
    if (!t.real()) throw Error("chart segments need real tree coordinates");
    PathSegment s;
    s.kind = Kind::chart;
    s.tree = std::move(t);
    s.eps_from = std::move(e0);
    s.eps_to = std::move(e1);
    return s;
  }

  std::size_t num_points() const { return kind == Kind::linear ? from.size() : tree->num_leaves(); }

  PathSegment reversed() const {
    PathSegment s = *this;
    std::swap(s.from, s.to);
    std::swap(s.eps_from, s.eps_to);
    return s;
  }

  /// Values within 1e-9 of the boundary are snapped onto it.
  double eps(double u) const {
    double e = (1.0 - u) * eps_from.get_d() + u * eps_to.get_d();
    double scale = std::max(std::abs(eps_from.get_d()), std::abs(eps_to.get_d()));
    return std::abs(e) < 1e-9 * scale ? 0.0 : e;
  }

  std::vector<double> points(double u) const {
    std::vector<double> z;
    if (kind == Kind::linear) {
      for (std::size_t j = 0; j < from.size(); ++j) z.push_back((1.0 - u) * from[j].get_d() + u * to[j].get_d());
    } else {
      for (const auto& c : tree_points<Complex>(*tree, Complex(eps(u)))) z.push_back(c.real());
    }
    return z;
  }

  std::string describe() const {
    std::string s;
    if (kind == Kind::linear) {
      s = "line[";
      for (std::size_t j = 0; j < from.size(); ++j) s += (j ? "," : "") + from[j].get_str();
      s += "->";
      for (std::size_t j = 0; j < to.size(); ++j) s += (j ? "," : "") + to[j].get_str();
      return s + "]";
    }
    return "chart[" + tree->str() + ":" + eps_from.get_str() + "->" + eps_to.get_str() + "]";
  }
};

struct ParamPath {
  std::vector<PathSegment> segments;
  StepControl step;

  std::size_t num_points() const { return segments.empty() ? 0 : segments.front().num_points(); }

  ParamPath reversed() const {
    ParamPath p;
    p.step = step;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) p.segments.push_back(it->reversed());
    return p;
  }

  ParamPath then(const ParamPath& other) const {
    ParamPath p = *this;
    p.segments.insert(p.segments.end(), other.segments.begin(), other.segments.end());
    return p;
  }

  /// FNV-1a over the segment descriptions and step settings.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const std::string& s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
      }
    };
    for (const auto& s : segments) mix(s.describe());
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g/%.17g/%.17g/%.17g", step.initial, step.min, step.max, step.gap_floor);
    mix(buf);
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

struct PermutationResult {
  std::vector<std::size_t> permutation;  // base eigenline a ends on base eigenline permutation[a]
  double min_gap = std::numeric_limits<double>::infinity();
  double min_overlap = 1.0;       // over accepted steps
  double min_join_overlap = 1.0;  // where generator sets switch, and at the end
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::string path_hash;
};

inline std::vector<std::size_t> compose(const std::vector<std::size_t>& second, const std::vector<std::size_t>& first) {
  std::vector<std::size_t> out(first.size());
  for (std::size_t a = 0; a < first.size(); ++a) out[a] = second[first[a]];
  return out;
}

inline bool is_identity(const std::vector<std::size_t>& p) {
  for (std::size_t a = 0; a < p.size(); ++a)
    if (p[a] != a) return false;
  return true;
}

inline std::string permutation_string(const std::vector<std::size_t>& p) {
  std::string s = "[";
  for (std::size_t a = 0; a < p.size(); ++a) s += (a ? "," : "") + std::to_string(p[a]);
  return s + "]";
}

/// Joint eigenlines of the sl2 Gaudin algebra on V^sing, in fixed exact coordinates.
class EigenlineTracker {
 public:
  struct Frame {
    std::vector<Eigen::VectorXcd> lines;  // G-normalized
    std::vector<std::vector<Complex>> values;
    double gap = std::numeric_limits<double>::infinity();
    bool simple = false;
  };

  EigenlineTracker(Algebra alg, std::vector<int> weights)
      : alg_(std::move(alg)), weights_(std::move(weights)), t_(sl2_tensor_space(alg_, weights_)) {
    sing_ = singular_subspace(t_);
    sing_c_ = sing_.convert<Complex>();
    gram_ = subspace_gram(t_, sing_);
  }

  std::size_t dim() const { return sing_.dim(); }
  const TensorSpace& space() const { return t_; }

  Frame frame(const PathSegment& seg, double u, const SpectralTolerances& tol = {}) const {
    std::vector<Eigen::MatrixXcd> ops;
    if (seg.kind == PathSegment::Kind::linear) {
      std::vector<Complex> z;
      for (double x : seg.points(u)) z.emplace_back(x);
      auto gens = generator_set(GaudinParams<Complex>(alg_, z), t_, sing_c_);
      for (const auto& op : gens.ops) ops.push_back(op.to_dense());
    } else {
      auto fam = chart_family<Complex>(*seg.tree, alg_, Complex(seg.eps(u)));
      for (const auto& e : fam.elements) ops.push_back(restrict_to(e.evaluate(t_), sing_c_).to_dense());
    }
    return frame_of(ops, tol);
  }

  Frame frame_at(const std::vector<Rational>& z) const { return frame(PathSegment::line(z, z), 0.0); }

  /// |<v_a, w_b>_G| for G-normalized lines.
  Eigen::MatrixXd overlaps(const std::vector<Eigen::VectorXcd>& a, const std::vector<Eigen::VectorXcd>& b) const {
    Eigen::MatrixXd o(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::abs(a[i].dot(gram_ * b[j]));
    return o;
  }

  /// Greedy assignment by decreasing overlap; returns the matching and its smallest overlap.
  static std::pair<std::vector<std::size_t>, double> match(const Eigen::MatrixXd& o) {
    const auto n = static_cast<std::size_t>(o.rows());
    std::vector<std::size_t> to(n, SIZE_MAX);
    std::vector<bool> used(n, false);
    double worst = 1.0;
    for (std::size_t round = 0; round < n; ++round) {
      double best = -1.0;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (to[i] != SIZE_MAX) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!used[j] && o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > best) {
            best = o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            bi = i;
            bj = j;
          }
      }
      to[bi] = bj;
      used[bj] = true;
      worst = std::min(worst, best);
    }
    return {to, worst};
  }

 private:
  Frame frame_of(const std::vector<Eigen::MatrixXcd>& ops, const SpectralTolerances& tol) const {
    auto spec = joint_diagonalize(ops, gram_, {}, tol, false);
    Frame f;
    auto simple = simple_spectrum(spec, tol);
    f.gap = simple.min_gap;
    f.simple = simple.simple;
    for (const auto& sp : spec.spaces) {
      f.values.push_back(sp.values);
      f.lines.push_back(sp.basis.col(0));
    }
    return f;
  }

  Algebra alg_;
  std::vector<int> weights_;
  TensorSpace t_;
  Subspace<QQ> sing_;
  Subspace<Complex> sing_c_;
  Eigen::MatrixXcd gram_;
};

namespace detail {

/// z_end = a z_start + b with real a != 0.
inline bool affinely_equal(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-9) {
  if (a.size() != b.size() || a.size() < 2) return false;
  double scale = (b[1] - b[0]) / (a[1] - a[0]);
  double shift = b[0] - scale * a[0];
  if (std::abs(scale) < tol) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::abs(scale * a[j] + shift - b[j]) > tol * std::max(1.0, std::abs(b[j]))) return false;
  return true;
}

}  // namespace detail

/// Follows every joint eigenline along the path; the end configuration must be
/// an affine image of the start one, and the result says which starting line
/// each line returns to (lines indexed by sorted eigenvalue tuple at the start).
inline PermutationResult track_eigenlines(const ParamPath& path, const EigenlineTracker& tracker,
                                          const SpectralTolerances& tol = {}) {
  if (path.segments.empty()) throw Error("track_eigenlines: empty path");
  const StepControl& sc = path.step;
  PermutationResult res;
  res.path_hash = path.hash();
  auto start_z = path.segments.front().points(0.0), end_z = path.segments.back().points(1.0);
  if (!detail::affinely_equal(start_z, end_z)) throw Error("track_eigenlines: path does not close up to an affine map");

  auto base = tracker.frame(path.segments.front(), 0.0, tol);
  if (!base.simple || base.gap < sc.gap_floor)
    throw Error("track_eigenlines: spectrum at the start point is not simple (gap " + std::to_string(base.gap) + ")");
  res.min_gap = base.gap;
  std::vector<Eigen::VectorXcd> lines = base.lines;
  auto follow = [&](std::vector<std::size_t> to, const std::vector<Eigen::VectorXcd>& next) {
    std::vector<Eigen::VectorXcd> out(lines.size());
    for (std::size_t a = 0; a < lines.size(); ++a) out[a] = next[to[a]];
    lines = std::move(out);
  };

  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const auto& seg = path.segments[k];
    if (k > 0) {
      auto f = tracker.frame(seg, 0.0, tol);
      auto [to, worst] = EigenlineTracker::match(tracker.overlaps(lines, f.lines));
      res.min_join_overlap = std::min(res.min_join_overlap, worst);
      if (worst < sc.join)
        throw Error("track_eigenlines: generator switch at segment " + std::to_string(k) + " is inconsistent (overlap " +
                    std::to_string(worst) + ")");
      follow(to, f.lines);
    }
    double u = 0.0, h = sc.initial;
    while (u < 1.0) {
      double step = std::min(h, 1.0 - u);
      auto f = tracker.frame(seg, u + step, tol);
      if (f.gap < sc.gap_floor || !f.simple) {
        throw Error("track_eigenlines: eigenvalue gap " + std::to_string(f.gap) + " below floor at segment " +
                    std::to_string(k) + ", u = " + std::to_string(u + step));
      }
      auto [to, worst] = EigenlineTracker::match(tracker.overlaps(lines, f.lines));
      if (worst < sc.accept) {
        ++res.rejected;
        h = step / 2;
        if (h < sc.min)
          throw Error("track_eigenlines: ambiguous matching at segment " + std::to_string(k) + ", u = " +
                      std::to_string(u) + " (best overlap " + std::to_string(worst) + ")");
        continue;
      }
      follow(to, f.lines);
      res.min_gap = std::min(res.min_gap, f.gap);
      res.min_overlap = std::min(res.min_overlap, worst);
      ++res.steps;
      u += step;
      if (1.0 - u < 1e-12) u = 1.0;
      h = std::min(step * 1.5, sc.max);
    }
  }
  auto [to, worst] = EigenlineTracker::match(tracker.overlaps(lines, base.lines));
  res.min_join_overlap = std::min(res.min_join_overlap, worst);
  if (worst < sc.join) throw Error("track_eigenlines: end lines do not match the start lines (overlap " + std::to_string(worst) + ")");
  res.permutation = to;
  return res;
}

/// A loop in the real configuration space written as a sequence of cactus
/// moves: move (p, q) reverses the points in positions p..q (0-based, p < q)
/// by passing through the boundary stratum where they collide.
struct CactusLoop {
  std::string name;
  std::vector<std::pair<std::size_t, std::size_t>> moves;
};

/// Labels at positions 0..N-1 after the moves (labels 1-based).
inline std::vector<std::size_t> cactus_order(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& moves) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 1);
  for (auto [p, q] : moves) {
    if (p >= q || q >= n) throw Error("cactus move (" + std::to_string(p) + "," + std::to_string(q) + ") out of range");
    std::reverse(order.begin() + static_cast<std::ptrdiff_t>(p), order.begin() + static_cast<std::ptrdiff_t>(q) + 1);
  }
  return order;
}

/// +1 if the moves return to the start order, -1 if to its reverse, 0 otherwise.
inline int cactus_closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& moves) {
  auto order = cactus_order(n, moves);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 1);
  if (order == id) return 1;
  std::reverse(id.begin(), id.end());
  return order == id ? -1 : 0;
}

/// `first` followed by `second`, mirroring the moves of `second` when `first` ends reversed.
inline CactusLoop concatenate(const CactusLoop& first, const CactusLoop& second, std::size_t n) {
  int o = cactus_closure(n, first.moves);
  if (o == 0) throw Error("concatenate: first loop does not close");
  CactusLoop out{first.name + "*" + second.name, first.moves};
  for (auto [p, q] : second.moves) out.moves.push_back(o > 0 ? std::make_pair(p, q) : std::make_pair(n - 1 - q, n - 1 - p));
  return out;
}

namespace detail {

inline std::vector<Rational> standard_positions(const std::vector<std::size_t>& order) {
  std::vector<Rational> z(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) z[order[k] - 1] = Rational(static_cast<long>(k));
  return z;
}

/// Root: positions outside [p,q] as leaves, the block as one child at its centre.
inline OperadTree move_tree(const std::vector<std::size_t>& order, std::size_t p, std::size_t q) {
  std::string s = "(";
  bool first = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > p && k <= q) continue;
    if (!first) s += ",";
    first = false;
    if (k == p) {
      s += "(";
      for (std::size_t j = p; j <= q; ++j) s += (j > p ? "," : "") + std::to_string(order[j]) + "@" + std::to_string(j - p);
      Rational m(static_cast<long>(p + q), 2);
      m.canonicalize();
      s += ")@" + m.get_str();
    } else {
      s += std::to_string(order[k]) + "@" + std::to_string(k);
    }
  }
  return OperadTree::parse(s + ")");
}

inline std::vector<Rational> real_points(const OperadTree& tree, const Rational& eps) {
  std::vector<Rational> z;
  for (const auto& c : tree_points<QQ>(tree, QQ(eps))) z.push_back(c.real());
  return z;
}

}  // namespace detail

/// Three pieces per move: slide into the chart, cross the boundary, slide back.
inline ParamPath cactus_path(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& moves,
                             const StepControl& step = {}) {
  ParamPath path;
  path.step = step;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 1);
  Rational eps(1, static_cast<long>(2 * n));
  for (auto [p, q] : moves) {
    if (p >= q || q >= n) throw Error("cactus move (" + std::to_string(p) + "," + std::to_string(q) + ") out of range");
    if (p == 0 && q == n - 1) throw Error("cactus move over all points crosses no boundary stratum");
    auto tree = detail::move_tree(order, p, q);
    path.segments.push_back(PathSegment::line(detail::standard_positions(order), detail::real_points(tree, eps)));
    path.segments.push_back(PathSegment::chart(tree, eps, Rational(-eps)));
    std::reverse(order.begin() + static_cast<std::ptrdiff_t>(p), order.begin() + static_cast<std::ptrdiff_t>(q) + 1);
    path.segments.push_back(PathSegment::line(detail::real_points(tree, Rational(-eps)), detail::standard_positions(order)));
  }
  return path;
}

/// Closing move sequences up to length `max_len`, no move repeated back to back,
/// the full reversal excluded.
inline std::vector<CactusLoop> closing_sequences(std::size_t n, std::size_t max_len) {
  std::vector<std::pair<std::size_t, std::size_t>> moves;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      if (!(p == 0 && q == n - 1)) moves.emplace_back(p, q);
  std::vector<CactusLoop> out;
  std::vector<std::pair<std::size_t, std::size_t>> cur;
  std::function<void()> rec = [&] {
    if (!cur.empty() && cactus_closure(n, cur) != 0) {
      std::string name;
      for (auto [p, q] : cur) name += "s" + std::to_string(p) + std::to_string(q);
      out.push_back({name, cur});
    }
    if (cur.size() == max_len) return;
    for (const auto& m : moves) {
      if (!cur.empty() && cur.back() == m) continue;
      cur.push_back(m);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

/// Standard loops: N = 3 the full circle and a back-and-forth loop; N = 4 a
/// back-and-forth loop and closing sequences of length 4 (see closing_sequences).
inline std::vector<CactusLoop> cactus_catalog(std::size_t n) {
  if (n == 3) return {{"circle", {{0, 1}, {1, 2}, {0, 1}}}, {"back-forth", {{0, 1}, {0, 1}}}};
  if (n == 4)
    return {{"s12s12", {{1, 2}, {1, 2}}},
            {"s01s23", {{0, 1}, {2, 3}, {0, 1}, {2, 3}}},
            {"s01s12s01s02", {{0, 1}, {1, 2}, {0, 1}, {0, 2}}},
            {"s02s13", {{0, 2}, {1, 3}, {0, 2}, {1, 3}}},
            {"s01s12s23s02", {{0, 1}, {1, 2}, {2, 3}, {0, 2}}},
            {"s12s13s12s23", {{1, 2}, {1, 3}, {1, 2}, {2, 3}}}};
  throw Error("cactus_catalog: only N = 3 and N = 4 are catalogued");
}

struct LoopResult {
  CactusLoop loop;
  int orientation = 0;
  PermutationResult result;
  PermutationResult halved;  // maximum step halved
  bool step_robust = false;
  std::string error;

  bool ok() const { return error.empty() && step_robust; }
};

/// Every catalog loop tracked at the given step control and at half the maximum
/// step; loops run `threads` at a time, results in catalog order.
inline std::vector<LoopResult> cactus_loop_suite(std::size_t n, const Algebra& alg, const std::vector<int>& weights,
                                                 const std::vector<CactusLoop>& catalog, const StepControl& step = {},
                                                 unsigned threads = 1) {
  if (weights.size() != n) throw Error("cactus_loop_suite: weights do not match N");
  EigenlineTracker tracker(alg, weights);
  std::vector<LoopResult> out(catalog.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < catalog.size(); k = next++) {
      auto& r = out[k];
      r.loop = catalog[k];
      try {
        r.orientation = cactus_closure(n, catalog[k].moves);
        if (r.orientation == 0) throw Error("loop " + catalog[k].name + " does not close");
        auto path = cactus_path(n, catalog[k].moves, step);
        r.result = track_eigenlines(path, tracker);
        StepControl half = step;
        half.max /= 2;
        half.initial = std::min(half.initial, half.max);
        path.step = half;
        r.halved = track_eigenlines(path, tracker);
        r.step_robust = r.result.permutation == r.halved.permutation;
      } catch (const Error& e) {
        r.error = e.what();
      }
    }
  };
  threads = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace gaudin
