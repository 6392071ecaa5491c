#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gaudin/element.hpp"
#include "gaudin/gaudin.hpp"
#include "gaudin/spectral.hpp"
#include "gaudin/tensor_space.hpp"

namespace gaudin {

/// Ordered blocks M_1..M_k of {1..N} (1-based labels).
struct SetPartition {
  std::vector<std::vector<std::size_t>> blocks;

  SetPartition() = default;
  explicit SetPartition(std::vector<std::vector<std::size_t>> b) : blocks(std::move(b)) { validate(); }

  std::size_t size() const { return blocks.size(); }

  std::size_t num_points() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }

  void validate() const {
    const std::size_t n = num_points();
    std::vector<bool> seen(n + 1, false);
    if (blocks.empty()) throw Error("partition has no blocks");
    for (const auto& b : blocks) {
      if (b.empty()) throw Error("partition has an empty block");
      for (std::size_t j : b) {
        if (j < 1 || j > n) throw Error("partition label " + std::to_string(j) + " outside 1.." + std::to_string(n));
        if (seen[j]) throw Error("partition label " + std::to_string(j) + " appears twice");
        seen[j] = true;
      }
    }
  }
};

/// D_{M_1..M_k}: x^{(i)} -> sum_{j in M_i} x^{(j)}, extended multiplicatively.
template <Field S>
Element<S> d_homomorphism(const SetPartition& part, const Element<S>& x) {
  if (x.num_factors() != part.size())
    throw Error("d_homomorphism: element has " + std::to_string(x.num_factors()) + " factors, partition has " +
                std::to_string(part.size()) + " blocks");
  return x.substitute(part.num_points(), [&](const Letter& l) {
    std::vector<Letter> img;
    for (std::size_t j : part.blocks[l.factor - 1]) img.push_back(Letter{static_cast<std::uint32_t>(j), l.basis});
    return img;
  });
}

template <Field S>
SparseMatrix<S> d_homomorphism(const SetPartition& part, const Element<S>& x, const TensorSpace& t) {
  return d_homomorphism(part, x).evaluate(t);
}

/// I_M: x^{(i)} -> x^{(M_i)} into n factors.
template <Field S>
Element<S> i_homomorphism(const std::vector<std::size_t>& m, const Element<S>& x, std::size_t n) {
  if (m.empty()) throw Error("i_homomorphism: empty index set");
  if (x.num_factors() != m.size()) throw Error("i_homomorphism: element and index set differ in size");
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] < 1 || m[k] > n || (k > 0 && m[k] <= m[k - 1])) throw Error("i_homomorphism: index set must increase within 1..n");
  return x.substitute(n, [&](const Letter& l) {
    return std::vector<Letter>{Letter{static_cast<std::uint32_t>(m[l.factor - 1]), l.basis}};
  });
}

/// Places an operator on the factors M of t, identity on the others.
template <Field S>
SparseMatrix<S> i_homomorphism(const std::vector<std::size_t>& m, const SparseMatrix<S>& op, const TensorSpace& t) {
  const std::size_t n = t.num_factors();
  std::size_t sub_dim = 1;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < 1 || m[k] > n || (k > 0 && m[k] <= m[k - 1])) throw Error("i_homomorphism: index set must increase within 1..n");
    sub_dim *= t.factor(m[k] - 1).dim;
  }
  if (op.rows() != sub_dim || op.cols() != sub_dim) throw Error("i_homomorphism: operator has the wrong size");
  auto sub_index = [&](const std::vector<std::size_t>& idx) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < m.size(); ++k) r = r * t.factor(m[k] - 1).dim + idx[m[k] - 1];
    return r;
  };
  SparseMatrix<S> out(t.dim(), t.dim());
  for (std::size_t c = 0; c < t.dim(); ++c) {
    auto idx = t.multi_index(c);
    std::size_t sc = sub_index(idx);
    for (std::size_t sr = 0; sr < sub_dim; ++sr) {
      S v = op.at(sr, sc);
      if (scalar_is_zero(v)) continue;
      std::size_t rem = sr;
      auto ridx = idx;
      for (std::size_t k = m.size(); k-- > 0;) {
        std::size_t d = t.factor(m[k] - 1).dim;
        ridx[m[k] - 1] = rem % d;
        rem /= d;
      }
      out.add(t.flat_index(ridx), c, v);
    }
  }
  return out;
}

/// [a, b] = 0 in U(g)^{(x)N}, decided on PBW normal forms.
template <Field S>
bool commute_exactly(const Element<S>& a, const Element<S>& b, const LieAlgebraData& alg) {
  return (a * b - b * a).normal_form(alg).is_zero();
}

/// Labelled elements of U(g)^{(x)n}; ops are filled in by on_space().
template <Field S>
struct ElementFamily {
  std::size_t num_factors = 0;
  std::vector<std::string> labels;
  std::vector<std::string> provenance;
  std::vector<Element<S>> elements;

  std::size_t size() const { return elements.size(); }

  void push(std::string label, std::string origin, Element<S> e) {
    if (e.num_factors() != num_factors) throw Error("element family: wrong number of factors");
    if (e.is_zero()) return;
    labels.push_back(std::move(label));
    provenance.push_back(std::move(origin));
    elements.push_back(std::move(e));
  }

  GeneratorSet<S> on_space(const TensorSpace& t) const {
    GeneratorSet<S> g;
    g.complete = true;
    for (std::size_t k = 0; k < size(); ++k) g.push(provenance[k] + ":" + labels[k], elements[k], elements[k].evaluate(t));
    return g;
  }

  /// First non-commuting pair, if any.
  std::optional<std::pair<std::size_t, std::size_t>> noncommuting_pair(const LieAlgebraData& alg) const {
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = a + 1; b < size(); ++b)
        if (!commute_exactly(elements[a], elements[b], alg)) return std::make_pair(a, b);
    return std::nullopt;
  }

  /// Normal-form elements keyed by provenance and label, for order-free comparison.
  std::map<std::pair<std::string, std::string>, Element<S>> keyed(const LieAlgebraData& alg) const {
    std::map<std::pair<std::string, std::string>, Element<S>> m;
    for (std::size_t k = 0; k < size(); ++k) m.emplace(std::make_pair(provenance[k], labels[k]), elements[k].normal_form(alg));
    return m;
  }
};

/// The homogeneous quadratic generators of A(z) as elements: S^{i,1}, S^{i,2}, diag-casimir.
template <Field S>
ElementFamily<S> gaudin_elements(const GaudinParams<S>& p, const std::string& origin = "") {
  if (!p.homogeneous()) throw Error("gaudin_elements: only the homogeneous algebra enters limit algebras");
  auto g = generating_function(p);
  ElementFamily<S> f;
  f.num_factors = p.N();
  for (std::size_t i = 1; i <= p.N(); ++i) {
    f.push("S^{" + std::to_string(i) + ",1}", origin, g.pole1[i - 1]);
    f.push("S^{" + std::to_string(i) + ",2}", origin, g.pole2[i - 1]);
  }
  f.push("diag-casimir", origin, diagonal_casimir_element<S>(p.N(), *p.alg));
  return f;
}

/// D(outer) together with I_{M_i}(inner_i); throws if the union fails to commute.
template <Field S>
ElementFamily<S> gamma_substitute(const SetPartition& part, const ElementFamily<S>& outer,
                                  const std::vector<ElementFamily<S>>& inner, const LieAlgebraData& alg) {
  part.validate();
  if (outer.num_factors != part.size()) throw Error("gamma_substitute: outer algebra does not match the partition");
  if (inner.size() != part.size()) throw Error("gamma_substitute: need one inner algebra per block");
  ElementFamily<S> out;
  out.num_factors = part.num_points();
  for (std::size_t k = 0; k < outer.size(); ++k)
    out.push(outer.labels[k], outer.provenance[k], d_homomorphism(part, outer.elements[k]));
  for (std::size_t b = 0; b < part.size(); ++b) {
    if (inner[b].num_factors != part.blocks[b].size())
      throw Error("gamma_substitute: inner algebra " + std::to_string(b + 1) + " does not match its block");
    std::vector<std::size_t> m = part.blocks[b];
    if (!std::is_sorted(m.begin(), m.end())) {
      // reorder the inner factors to increasing labels
      std::vector<std::size_t> perm(m.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) { return m[x] < m[y]; });
      std::vector<std::size_t> pos(m.size());
      for (std::size_t r = 0; r < perm.size(); ++r) pos[perm[r]] = r + 1;
      std::sort(m.begin(), m.end());
      for (std::size_t k = 0; k < inner[b].size(); ++k) {
        auto e = inner[b].elements[k].substitute(m.size(), [&](const Letter& l) {
          return std::vector<Letter>{Letter{static_cast<std::uint32_t>(pos[l.factor - 1]), l.basis}};
        });
        out.push(inner[b].labels[k], inner[b].provenance[k], i_homomorphism(m, e, out.num_factors));
      }
      continue;
    }
    for (std::size_t k = 0; k < inner[b].size(); ++k)
      out.push(inner[b].labels[k], inner[b].provenance[k], i_homomorphism(m, inner[b].elements[k], out.num_factors));
  }
  if (auto bad = out.noncommuting_pair(alg))
    throw Error("gamma_substitute: " + out.provenance[bad->first] + ":" + out.labels[bad->first] + " and " +
                out.provenance[bad->second] + ":" + out.labels[bad->second] + " do not commute (non-invariant input?)");
  return out;
}

/// Rooted tree with leaves 1..N; every internal vertex carries distinct
/// coordinates for its children, normalized to first = 0 and last = 1.
class OperadTree {
 public:
  struct Node {
    std::size_t leaf = 0;  // label for leaves, 0 for internal vertices
    std::size_t parent = SIZE_MAX;
    std::vector<std::size_t> children;
    std::vector<QQ> coords;
  };

  /// Syntax: leaf := integer; vertex := "(" item ("," item)* ")"; item := (leaf | vertex) ["@" number].
  /// Coordinates are all present or all absent within one vertex (absent: evenly spaced).
  static OperadTree parse(const std::string& text) {
    OperadTree t;
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    std::function<std::size_t()> node = [&]() -> std::size_t {
      skip();
      if (pos >= text.size()) throw Error("tree: unexpected end of input");
      std::size_t id = t.nodes_.size();
      t.nodes_.emplace_back();
      if (text[pos] == '(') {
        ++pos;
        std::vector<std::optional<QQ>> given;
        for (;;) {
          std::size_t child = node();
          t.nodes_[child].parent = id;
          t.nodes_[id].children.push_back(child);
          skip();
          if (pos < text.size() && text[pos] == '@') {
            ++pos;
            std::size_t start = pos;
            while (pos < text.size() && text[pos] != ',' && text[pos] != ')') ++pos;
            given.push_back(parse_number(text.substr(start, pos - start)).value);
          } else {
            given.push_back(std::nullopt);
          }
          skip();
          if (pos >= text.size()) throw Error("tree: missing ')'");
          if (text[pos] == ',') {
            ++pos;
            continue;
          }
          if (text[pos] == ')') {
            ++pos;
            break;
          }
          throw Error(std::string("tree: unexpected character '") + text[pos] + "' at offset " + std::to_string(pos));
        }
        const std::size_t k = given.size();
        bool all = std::all_of(given.begin(), given.end(), [](const auto& g) { return g.has_value(); });
        bool none = std::none_of(given.begin(), given.end(), [](const auto& g) { return g.has_value(); });
        if (!all && !none) throw Error("tree: give coordinates for all children of a vertex or for none");
        for (std::size_t j = 0; j < k; ++j) t.nodes_[id].coords.push_back(all ? *given[j] : QQ(static_cast<long>(j)));
      } else {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw Error("tree: expected a leaf label or '(' at offset " + std::to_string(start));
        t.nodes_[id].leaf = std::stoul(text.substr(start, pos - start));
        if (t.nodes_[id].leaf == 0) throw Error("tree: leaf labels start at 1");
      }
      return id;
    };
    node();
    skip();
    if (pos != text.size()) throw Error("tree: trailing input at offset " + std::to_string(pos));
    t.finish();
    return t;
  }

  /// Depth-1 tree with the given coordinates (an interior point of moduli space).
  static OperadTree flat(const std::vector<QQ>& z) {
    if (z.size() < 2) throw Error("tree needs at least two leaves");
    OperadTree t;
    t.nodes_.emplace_back();
    for (std::size_t j = 0; j < z.size(); ++j) {
      t.nodes_.push_back(Node{j + 1, 0, {}, {}});
      t.nodes_[0].children.push_back(j + 1);
      t.nodes_[0].coords.push_back(z[j]);
    }
    t.finish();
    return t;
  }

  std::size_t num_leaves() const { return leaf_node_.size(); }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t v) const { return nodes_[v]; }
  bool is_leaf(std::size_t v) const { return nodes_[v].leaf != 0; }
  std::size_t root() const { return 0; }
  std::size_t leaf_node(std::size_t label) const { return leaf_node_.at(label - 1); }

  std::vector<std::size_t> internal_vertices() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v)
      if (!is_leaf(v)) out.push_back(v);
    return out;
  }

  /// Sorted leaf labels below v.
  const std::vector<std::size_t>& leaves(std::size_t v) const { return leaves_[v]; }

  std::size_t depth(std::size_t v) const {
    std::size_t d = 0;
    while (nodes_[v].parent != SIZE_MAX) {
      v = nodes_[v].parent;
      ++d;
    }
    return d;
  }

  std::size_t height() const {
    std::size_t h = 0;
    for (std::size_t v : internal_vertices()) h = std::max(h, depth(v) + 1);
    return h;
  }

  /// Lowest common ancestor of two vertices.
  std::size_t lca(std::size_t a, std::size_t b) const {
    std::set<std::size_t> up;
    for (std::size_t v = a; v != SIZE_MAX; v = nodes_[v].parent) up.insert(v);
    for (std::size_t v = b; v != SIZE_MAX; v = nodes_[v].parent)
      if (up.count(v)) return v;
    throw Error("tree: vertices have no common ancestor");
  }

  /// Index (among v's children) of the child whose subtree contains leaf `label`.
  std::size_t child_toward(std::size_t v, std::size_t label) const {
    const auto& ch = nodes_[v].children;
    for (std::size_t k = 0; k < ch.size(); ++k)
      if (std::binary_search(leaves_[ch[k]].begin(), leaves_[ch[k]].end(), label)) return k;
    throw Error("tree: leaf " + std::to_string(label) + " is not below vertex");
  }

  std::string vertex_name(std::size_t v) const {
    std::string s = "{";
    for (std::size_t k = 0; k < leaves_[v].size(); ++k) s += (k ? "," : "") + std::to_string(leaves_[v][k]);
    return s + "}";
  }

  std::string str() const { return str(root()); }

  std::string shape() const { return shape(root()); }

  /// Every coordinate real.
  bool real() const {
    for (const auto& n : nodes_)
      for (const auto& c : n.coords)
        if (!c.is_real()) return false;
    return true;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> leaves_;
  std::vector<std::size_t> leaf_node_;

  void finish() {
    leaves_.assign(nodes_.size(), {});
    std::size_t n = 0;
    for (const auto& nd : nodes_) n += nd.leaf != 0;
    leaf_node_.assign(n, SIZE_MAX);
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      const auto& nd = nodes_[v];
      if (nd.leaf != 0) {
        if (nd.leaf > n) throw Error("tree: leaf label " + std::to_string(nd.leaf) + " exceeds the number of leaves");
        if (leaf_node_[nd.leaf - 1] != SIZE_MAX) throw Error("tree: leaf label " + std::to_string(nd.leaf) + " repeated");
        leaf_node_[nd.leaf - 1] = v;
      } else if (nd.children.size() < 2) {
        throw Error("tree: every internal vertex needs at least two children");
      }
    }
    if (n < 2) throw Error("tree needs at least two leaves");
    for (std::size_t v = nodes_.size(); v-- > 0;) {
      if (nodes_[v].leaf != 0) leaves_[v] = {nodes_[v].leaf};
      for (std::size_t c : nodes_[v].children) leaves_[v].insert(leaves_[v].end(), leaves_[c].begin(), leaves_[c].end());
      std::sort(leaves_[v].begin(), leaves_[v].end());
    }
    for (auto& nd : nodes_) {
      if (nd.leaf != 0) continue;
      for (std::size_t a = 0; a < nd.coords.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          if (nd.coords[a] == nd.coords[b]) throw Error("tree: coincident coordinates " + nd.coords[a].str() + " at a vertex");
      QQ x0 = nd.coords.front(), span = nd.coords.back() - nd.coords.front();
      for (auto& c : nd.coords) c = (c - x0) / span;
    }
  }

  std::string str(std::size_t v) const {
    if (is_leaf(v)) return std::to_string(nodes_[v].leaf);
    std::string s = "(";
    for (std::size_t k = 0; k < nodes_[v].children.size(); ++k)
      s += (k ? "," : "") + str(nodes_[v].children[k]) + "@" + nodes_[v].coords[k].str();
    return s + ")";
  }

  std::string shape(std::size_t v) const {
    if (is_leaf(v)) return "*";
    std::vector<std::string> parts;
    for (std::size_t c : nodes_[v].children) parts.push_back(shape(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "," : "") + parts[k];
    return s + ")";
  }
};

namespace detail {

/// All ways to split `set` into >= 2 unordered nonempty blocks, blocks ordered by first element.
inline void split_set(const std::vector<std::size_t>& set, std::size_t pos, std::vector<std::vector<std::size_t>>& cur,
                      std::vector<std::vector<std::vector<std::size_t>>>& out) {
  if (pos == set.size()) {
    if (cur.size() >= 2) out.push_back(cur);
    return;
  }
  for (std::size_t b = 0; b < cur.size(); ++b) {
    cur[b].push_back(set[pos]);
    split_set(set, pos + 1, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({set[pos]});
  split_set(set, pos + 1, cur, out);
  cur.pop_back();
}

inline std::vector<std::string> trees_on(const std::vector<std::size_t>& set) {
  if (set.size() == 1) return {std::to_string(set[0])};
  std::vector<std::vector<std::vector<std::size_t>>> splits;
  std::vector<std::vector<std::size_t>> cur;
  split_set(set, 0, cur, splits);
  std::vector<std::string> out;
  for (const auto& blocks : splits) {
    std::vector<std::string> acc{""};
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::vector<std::string> next;
      for (const auto& prefix : acc)
        for (const auto& sub : trees_on(blocks[b])) next.push_back(prefix + (b ? "," : "") + sub);
      acc = std::move(next);
    }
    for (const auto& s : acc) out.push_back("(" + s + ")");
  }
  return out;
}

}  // namespace detail

/// All trees with leaves 1..N and default coordinates, excluding the depth-1 tree.
inline std::vector<OperadTree> boundary_trees(std::size_t n) {
  if (n < 2 || n > 7) throw Error("boundary_trees: N must be in 2..7");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 1);
  std::vector<OperadTree> out;
  for (const auto& s : detail::trees_on(all)) {
    auto t = OperadTree::parse(s);
    if (t.height() >= 2) out.push_back(std::move(t));
  }
  return out;
}

/// Limit algebra assembled vertex by vertex: the homogeneous generators of the
/// configuration at each internal vertex, pushed through D (children as blocks)
/// and I (the vertex's leaves). `order` lists internal vertices; empty = canonical.
inline ElementFamily<QQ> limit_algebra(const OperadTree& tree, const Algebra& alg,
                                       std::vector<std::size_t> order = {}) {
  if (order.empty()) order = tree.internal_vertices();
  auto expected = tree.internal_vertices();
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != expected) throw Error("limit_algebra: order must list every internal vertex once");
  const std::size_t n = tree.num_leaves();
  ElementFamily<QQ> out;
  out.num_factors = n;
  for (std::size_t v : order) {
    const auto& nd = tree.node(v);
    GaudinParams<QQ> p(alg, nd.coords);
    auto local = gaudin_elements(p, tree.vertex_name(v));
    const auto& lv = tree.leaves(v);
    SetPartition part;
    for (std::size_t c : nd.children) {
      std::vector<std::size_t> block;
      for (std::size_t leaf : tree.leaves(c))
        block.push_back(static_cast<std::size_t>(std::lower_bound(lv.begin(), lv.end(), leaf) - lv.begin()) + 1);
      part.blocks.push_back(std::move(block));
    }
    part.validate();
    for (std::size_t k = 0; k < local.size(); ++k)
      out.push(local.labels[k], local.provenance[k], i_homomorphism(lv, d_homomorphism(part, local.elements[k]), n));
  }
  if (auto bad = out.noncommuting_pair(*alg))
    throw Error("limit_algebra: " + out.provenance[bad->first] + ":" + out.labels[bad->first] + " and " +
                out.provenance[bad->second] + ":" + out.labels[bad->second] + " do not commute");
  return out;
}

inline std::vector<std::size_t> shuffled_vertex_order(const OperadTree& tree, std::uint64_t seed) {
  auto order = tree.internal_vertices();
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

/// The same algebra by nested gamma_substitute, one level at a time.
inline ElementFamily<QQ> limit_algebra_recursive(const OperadTree& tree, const Algebra& alg) {
  std::function<ElementFamily<QQ>(std::size_t)> build = [&](std::size_t v) -> ElementFamily<QQ> {
    if (tree.is_leaf(v)) {
      ElementFamily<QQ> f;
      f.num_factors = 1;
      return f;
    }
    const auto& nd = tree.node(v);
    const auto& lv = tree.leaves(v);
    auto outer = gaudin_elements(GaudinParams<QQ>(alg, nd.coords), tree.vertex_name(v));
    SetPartition part;
    std::vector<ElementFamily<QQ>> inner;
    for (std::size_t c : nd.children) {
      std::vector<std::size_t> block;
      for (std::size_t leaf : tree.leaves(c))
        block.push_back(static_cast<std::size_t>(std::lower_bound(lv.begin(), lv.end(), leaf) - lv.begin()) + 1);
      part.blocks.push_back(std::move(block));
      inner.push_back(build(c));
    }
    return gamma_substitute(part, outer, inner, *alg);
  };
  return build(tree.root());
}

/// Collision schedule: each non-root vertex at depth d scales its coordinates
/// by s^d, z_j = sum over the path root -> j of s^{depth(w)} x_w(child toward j).
template <Field S>
std::vector<S> tree_points(const OperadTree& tree, const S& s) {
  std::vector<S> z;
  for (std::size_t j = 1; j <= tree.num_leaves(); ++j) {
    S acc{}, scale = scalar_from<S>(1L);
    for (std::size_t v = tree.root();;) {
      std::size_t k = tree.child_toward(v, j);
      acc += scale * FieldTraits<S>::from(tree.node(v).coords[k]);
      v = tree.node(v).children[k];
      if (tree.is_leaf(v)) break;
      scale *= s;
    }
    z.push_back(acc);
  }
  return z;
}

/// Origin of the cluster below v on the schedule: the point v sits at in its parent.
template <Field S>
S cluster_origin(const OperadTree& tree, std::size_t v, const S& s) {
  std::vector<std::size_t> path;
  for (std::size_t u = v; u != tree.root(); u = tree.node(u).parent) path.push_back(u);
  std::reverse(path.begin(), path.end());
  S acc{}, scale = scalar_from<S>(1L);
  std::size_t u = tree.root();
  for (std::size_t w : path) {
    const auto& ch = tree.node(u).children;
    std::size_t k = static_cast<std::size_t>(std::find(ch.begin(), ch.end(), w) - ch.begin());
    acc += scale * FieldTraits<S>::from(tree.node(u).coords[k]);
    scale *= s;
    u = w;
  }
  return acc;
}

/// Rescaled members of A(z(s)) that converge to generators of the limit algebra:
///   G_{v,c} = s^{depth v} sum_{j in c} S^{j,1}   (v internal, c a child of v)
///   F_c     = sum_{j in c} C^{(j)} + sum_{j in c} (z_j - x_c) S^{j,1}   (c internal, non-root)
/// together with every C^{(j)} and the diagonal Casimir. `exponent` is the power of s.
template <Field S>
struct ChartFamily {
  std::vector<std::string> labels;
  std::vector<int> exponents;
  std::vector<Element<S>> elements;
};

template <Field S>
ChartFamily<S> chart_family(const OperadTree& tree, const Algebra& alg, const S& s) {
  const std::size_t n = tree.num_leaves();
  ChartFamily<S> f;
  auto pow_s = [&](std::size_t d) {
    S r = scalar_from<S>(1L);
    for (std::size_t k = 0; k < d; ++k) r *= s;
    return r;
  };
  if (scalar_is_zero(s)) {
    for (std::size_t v : tree.internal_vertices()) {
      const auto& nd = tree.node(v);
      for (std::size_t a = 0; a < nd.children.size(); ++a) {
        Element<S> g(n);
        for (std::size_t b = 0; b < nd.children.size(); ++b) {
          if (a == b) continue;
          S w = scalar_from<S>(2L) / FieldTraits<S>::from(nd.coords[a] - nd.coords[b]);
          for (std::size_t j : tree.leaves(nd.children[a]))
            for (std::size_t k : tree.leaves(nd.children[b])) g += Element<S>::omega(n, *alg, j, k) * w;
        }
        f.labels.push_back("G" + tree.vertex_name(v) + tree.vertex_name(nd.children[a]));
        f.exponents.push_back(static_cast<int>(tree.depth(v)));
        f.elements.push_back(std::move(g));
      }
      if (v == tree.root()) continue;
      Element<S> c(n);
      for (std::size_t j : tree.leaves(v))
        for (std::size_t k : tree.leaves(v)) c += Element<S>::omega(n, *alg, j, k);
      f.labels.push_back("F" + tree.vertex_name(v));
      f.exponents.push_back(0);
      f.elements.push_back(std::move(c));
    }
  } else {
    auto z = tree_points<S>(tree, s);
    auto gf = generating_function(GaudinParams<S>(alg, z));
    for (std::size_t v : tree.internal_vertices()) {
      const auto& nd = tree.node(v);
      S scale = pow_s(tree.depth(v));
      for (std::size_t a = 0; a < nd.children.size(); ++a) {
        Element<S> g(n);
        for (std::size_t j : tree.leaves(nd.children[a])) g += gf.pole1[j - 1];
        f.labels.push_back("G" + tree.vertex_name(v) + tree.vertex_name(nd.children[a]));
        f.exponents.push_back(static_cast<int>(tree.depth(v)));
        f.elements.push_back(g * scale);
      }
      if (v == tree.root()) continue;
      S x = cluster_origin<S>(tree, v, s);
      Element<S> c(n);
      for (std::size_t j : tree.leaves(v)) c += gf.pole2[j - 1] + gf.pole1[j - 1] * (z[j - 1] - x);
      f.labels.push_back("F" + tree.vertex_name(v));
      f.exponents.push_back(0);
      f.elements.push_back(std::move(c));
    }
  }
  for (std::size_t j = 1; j <= n; ++j) {
    f.labels.push_back("C^{(" + std::to_string(j) + ")}");
    f.exponents.push_back(0);
    f.elements.push_back(Element<S>::omega(n, *alg, j, j));
  }
  f.labels.push_back("diag-casimir");
  f.exponents.push_back(0);
  f.elements.push_back(diagonal_casimir_element<S>(n, *alg));
  return f;
}

struct CollisionReport {
  std::string tree;
  std::vector<std::string> labels;
  std::vector<int> exponents;
  double s = 0.0;
  double raw_deviation = 0.0;       // max_k ||G_k(s) - G_k(0)|| / max(||G_k(0)||, 1)
  double raw_deviation_half = 0.0;  // same at s/2
  double deviation = 0.0;           // Richardson: ||2 G(s/2) - G(s) - G(0)||, same normalization
  double ratio = 0.0;               // raw_deviation_half / raw_deviation
  bool limit_in_span = false;       // G(0) inside the limit algebra's quadratic span
  bool spans_limit = false;         // and conversely
  std::vector<std::string> flat_samples;
  std::vector<std::size_t> flat_ranks;  // PBW rank of {1} + family; last entry at s = 0
  bool flat = false;

  bool passes(double dev_tol, double ratio_tol) const {
    return deviation <= dev_tol && ratio <= ratio_tol && limit_in_span && spans_limit && flat;
  }
};

/// Numerical convergence of the rescaled chart family along the collision
/// schedule of `tree`, measured on the operators of t, plus exact span and
/// flatness bookkeeping.
inline CollisionReport collision_limit_check(const OperadTree& tree, const TensorSpace& t, double s = 1e-4,
                                             std::vector<Rational> flat_samples = {}) {
  const auto& alg = t.algebra();
  if (t.num_factors() != tree.num_leaves()) throw Error("collision_limit_check: tensor space does not match the tree");
  if (!(s > 0.0)) throw Error("collision_limit_check: s must be positive");
  CollisionReport rep;
  rep.tree = tree.str();
  rep.s = s;
  auto limit0 = chart_family<QQ>(tree, alg, QQ(0L));
  rep.labels = limit0.labels;
  rep.exponents = limit0.exponents;
  auto eval = [&](const ChartFamily<Complex>& f) {
    std::vector<Eigen::MatrixXcd> m;
    for (const auto& e : f.elements) m.push_back(e.evaluate(t).to_dense());
    return m;
  };
  std::vector<Eigen::MatrixXcd> g0;
  for (const auto& e : limit0.elements) g0.push_back(e.evaluate(t).to_dense());
  auto gs = eval(chart_family<Complex>(tree, alg, Complex(s)));
  auto gh = eval(chart_family<Complex>(tree, alg, Complex(s / 2)));
  for (std::size_t k = 0; k < g0.size(); ++k) {
    double norm = std::max(g0[k].norm(), 1.0);
    rep.raw_deviation = std::max(rep.raw_deviation, (gs[k] - g0[k]).norm() / norm);
    rep.raw_deviation_half = std::max(rep.raw_deviation_half, (gh[k] - g0[k]).norm() / norm);
    rep.deviation = std::max(rep.deviation, (2.0 * gh[k] - gs[k] - g0[k]).norm() / norm);
  }
  rep.ratio = rep.raw_deviation > 0.0 ? rep.raw_deviation_half / rep.raw_deviation : 0.0;
  if (rep.ratio > 1.5)
    throw Error("collision_limit_check: rescaled generators diverge (ratio " + std::to_string(rep.ratio) + ")");

  auto limit = limit_algebra(tree, alg);
  std::vector<Element<QQ>> lim = limit.elements, both = limit.elements, chart = limit0.elements;
  lim.push_back(Element<QQ>::scalar(t.num_factors(), QQ(1L)));
  chart.push_back(Element<QQ>::scalar(t.num_factors(), QQ(1L)));
  both.insert(both.end(), chart.begin(), chart.end());
  both.push_back(Element<QQ>::scalar(t.num_factors(), QQ(1L)));
  std::size_t r_lim = pbw_rank(lim, t.alg()), r_both = pbw_rank(both, t.alg()), r_chart = pbw_rank(chart, t.alg());
  rep.limit_in_span = r_both == r_lim;
  rep.spans_limit = r_chart == r_lim;

  if (flat_samples.empty()) flat_samples = {Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
  for (const auto& q : flat_samples) {
    auto fam = chart_family<QQ>(tree, alg, QQ(q));
    fam.elements.push_back(Element<QQ>::scalar(t.num_factors(), QQ(1L)));
    rep.flat_samples.push_back(q.get_str());
    rep.flat_ranks.push_back(pbw_rank(fam.elements, t.alg()));
  }
  rep.flat_samples.push_back("0");
  rep.flat_ranks.push_back(r_chart);
  rep.flat = std::all_of(rep.flat_ranks.begin(), rep.flat_ranks.end(),
                         [&](std::size_t r) { return r == rep.flat_ranks.front(); });
  return rep;
}

struct LimitSuiteReport {
  std::string tree;
  std::string shape;
  std::size_t generators = 0;
  std::size_t sing_dim = 0;
  bool commutative = false;  // exact, in U(g)^{(x)N} and on the module
  CyclicityReport cyclic;
  SimplicityReport simple;
  JointSpectrum spectrum;
  std::string error;

  bool passes() const { return error.empty() && commutative && cyclic.verdict && simple.simple; }
};

/// Cyclicity and simplicity of the limit algebra on V^sing.
inline LimitSuiteReport limit_spectrum_suite(const OperadTree& tree, const TensorSpace& t, std::size_t trials = 20,
                                             std::uint64_t seed = 1, const SpectralTolerances& tol = {}) {
  LimitSuiteReport rep;
  rep.tree = tree.str();
  rep.shape = tree.shape();
  if (!tree.real()) throw Error("Hermiticity unavailable for non-real parameters");
  auto lim = limit_algebra(tree, t.algebra());
  rep.generators = lim.size();
  auto gens = lim.on_space(t);
  rep.commutative = gens.max_commutator() == 0.0;
  auto sing = singular_subspace(t);
  rep.sing_dim = sing.dim();
  auto restricted = gens.restricted(sing);
  rep.cyclic = is_cyclic(restricted.ops, sing.dim(), trials, seed);
  rep.spectrum = joint_diagonalize(restricted, subspace_gram(t, sing), tol);
  rep.simple = simple_spectrum(rep.spectrum, tol);
  return rep;
}

/// limit_spectrum_suite over a catalog, `threads` trees at a time; results in catalog order.
inline std::vector<LimitSuiteReport> limit_catalog_suite(const std::vector<OperadTree>& trees, const Algebra& alg,
                                                         const std::vector<int>& weights, std::size_t trials,
                                                         std::uint64_t seed, unsigned threads = 1) {
  std::vector<LimitSuiteReport> out(trees.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < trees.size(); k = next++) {
      try {
        auto t = sl2_tensor_space(alg, weights);
        out[k] = limit_spectrum_suite(trees[k], t, trials, seed + k);
      } catch (const Error& e) {
        out[k].tree = trees[k].str();
        out[k].shape = trees[k].shape();
        out[k].error = e.what();
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
