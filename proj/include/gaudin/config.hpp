#pragma once

// Experiment configuration files for the command-line driver. Needs yaml-cpp.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gaudin/covering.hpp"
#include "gaudin/field.hpp"
#include "gaudin/lie.hpp"
#include "gaudin/operad.hpp"

namespace gaudin {

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& field, const std::string& what)
      : Error(where(line, field) + what), line_(line), field_(field) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string where(int line, const std::string& field) {
    std::string s = "config";
    if (line > 0) s += " line " + std::to_string(line);
    if (!field.empty()) s += " field '" + field + "'";
    return s + ": ";
  }
  int line_;
  std::string field_;
};

/// Exact finite decimal expansion when the denominator is 2^a 5^b.
inline std::optional<std::string> exact_decimal(const Rational& q) {
  mpz_class den = q.get_den();
  long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  long k = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(k));
  mpz_class digits = q.get_num() * scale / q.get_den();
  bool neg = sgn(digits) < 0;
  if (neg) digits = -digits;
  std::string s = digits.get_str();
  if (k == 0) return (neg ? "-" : "") + s + ".0";
  if (static_cast<long>(s.size()) <= k) s = std::string(static_cast<std::size_t>(k) - s.size() + 1, '0') + s;
  s.insert(s.size() - static_cast<std::size_t>(k), ".");
  return (neg ? "-" : "") + s;
}

inline std::string format_number(const ParsedNumber& x) {
  auto part = [&](const Rational& q) {
    if (x.decimal)
      if (auto d = exact_decimal(q)) return *d;
    return q.get_str();
  };
  const auto& v = x.value;
  if (v.is_real()) return part(v.real());
  std::string im = part(v.imag());
  if (sgn(v.real()) == 0) return im + "i";
  return part(v.real()) + (sgn(v.imag()) > 0 ? "+" : "") + im + "i";
}

inline bool operator==(const ParsedNumber& a, const ParsedNumber& b) { return a.value == b.value && a.decimal == b.decimal; }

struct ExperimentConfig {
  std::string algebra = "sl2";
  std::string form = "trace";         // trace | killing
  std::string module = "irreducible";  // irreducible (sl2, by weights) | defining (sl_n)
  std::vector<int> weights;
  std::vector<ParsedNumber> points;
  std::vector<ParsedNumber> mu;        // coordinates in the algebra basis; empty means 0
  std::string subspace = "singular";   // singular | full
  bool hermitian_required = false;
  std::optional<int> m;                // number of Bethe roots (sector)
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-10;
  unsigned threads = 1;
  std::size_t bethe_starts = 200;
  std::string tree;                    // boundary tree; empty = whole catalog
  double collision_s = 1e-4;
  std::vector<CactusLoop> loops;       // empty = standard catalog

  std::size_t N() const { return points.size(); }

  /// Any decimal literal in the numeric data selects floating point.
  bool float_pipeline() const {
    for (const auto& p : points)
      if (p.decimal) return true;
    for (const auto& p : mu)
      if (p.decimal) return true;
    return false;
  }

  bool real_points() const {
    for (const auto& p : points)
      if (!p.value.is_real()) return false;
    return true;
  }

  std::vector<QQ> exact_points() const {
    std::vector<QQ> z;
    for (const auto& p : points) z.push_back(p.value);
    return z;
  }

  std::vector<Complex> complex_points() const {
    std::vector<Complex> z;
    for (const auto& p : points) z.push_back(p.value.to_complex());
    return z;
  }

  FormNormalization normalization() const { return form == "killing" ? FormNormalization::killing : FormNormalization::trace; }

  AlgebraElement mu_element(const LieAlgebraData& alg) const {
    if (mu.empty()) return alg.zero();
    if (mu.size() != alg.dim())
      throw ConfigError(0, "mu", "expected " + std::to_string(alg.dim()) + " coordinates, got " + std::to_string(mu.size()));
    AlgebraElement x;
    for (const auto& c : mu) {
      if (!c.value.is_real()) throw ConfigError(0, "mu", "coordinates must be real");
      x.push_back(c.value.real());
    }
    return x;
  }

  bool homogeneous() const {
    for (const auto& c : mu)
      if (!c.value.is_zero()) return false;
    return true;
  }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    auto loops_eq = [&] {
      if (a.loops.size() != b.loops.size()) return false;
      for (std::size_t k = 0; k < a.loops.size(); ++k)
        if (a.loops[k].name != b.loops[k].name || a.loops[k].moves != b.loops[k].moves) return false;
      return true;
    };
    return a.algebra == b.algebra && a.form == b.form && a.module == b.module && a.weights == b.weights &&
           a.points == b.points && a.mu == b.mu && a.subspace == b.subspace &&
           a.hermitian_required == b.hermitian_required && a.m == b.m && a.trials == b.trials && a.seed == b.seed &&
           a.tolerance == b.tolerance && a.threads == b.threads && a.bethe_starts == b.bethe_starts &&
           a.tree == b.tree && a.collision_s == b.collision_s && loops_eq();
  }
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

template <class T>
T scalar_as(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(line_of(n), field, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(line_of(n), field, "cannot read '" + n.Scalar() + "'");
  }
}

inline double parse_double(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(line_of(n), field, "expected a number");
  try {
    std::size_t used = 0;
    double v = std::stod(n.Scalar(), &used);
    if (used != n.Scalar().size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(line_of(n), field, "malformed number '" + n.Scalar() + "'");
  }
}

inline std::vector<ParsedNumber> parse_numbers(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(line_of(n), field, "expected a list");
  std::vector<ParsedNumber> out;
  for (const auto& item : n) {
    if (!item.IsScalar()) throw ConfigError(line_of(item), field, "expected a number");
    try {
      out.push_back(parse_number(item.Scalar()));
    } catch (const Error& e) {
      throw ConfigError(line_of(item), field, e.what());
    }
  }
  return out;
}

/// "h+e+f", "2*h - f", "1/2*e": a sum of basis labels with optional rational coefficients.
inline std::vector<ParsedNumber> parse_mu_expression(const std::string& text, const LieAlgebraData& alg, int line) {
  std::vector<ParsedNumber> out(alg.dim());
  for (auto& x : out) x.value = QQ(0L);
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "0") return out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    Rational sign(1);
    if (s[pos] == '+' || s[pos] == '-') sign = s[pos++] == '-' ? -1 : 1;
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    std::string term = s.substr(pos, end - pos);
    ParsedNumber coeff{QQ(sign), false};
    std::string label = term;
    if (auto star = term.find('*'); star != std::string::npos) {
      try {
        auto c = parse_number(term.substr(0, star));
        coeff.value = QQ(sign) * c.value;
        coeff.decimal = c.decimal;
      } catch (const Error& e) {
        throw ConfigError(line, "mu", e.what());
      }
      label = term.substr(star + 1);
    }
    std::size_t a = 0;
    try {
      a = alg.index_of(label);
    } catch (const Error& e) {
      throw ConfigError(line, "mu", e.what());
    }
    out[a].value += coeff.value;
    out[a].decimal = out[a].decimal || coeff.decimal;
    pos = end;
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "", e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) throw ConfigError(0, "", "empty configuration");
  if (!root.IsMap()) throw ConfigError(detail::line_of(root), "", "expected a mapping of fields");
  static const std::vector<std::string> known{"algebra", "form", "module", "weights", "points", "mu", "subspace",
                                              "hermitian_required", "m", "trials", "seed", "tolerance", "threads",
                                              "bethe_starts", "tree", "collision_s", "loops"};
  for (const auto& kv : root) {
    auto key = kv.first.Scalar();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(detail::line_of(kv.first), key, "unknown field");
  }
  using detail::line_of;
  if (root["algebra"]) cfg.algebra = detail::scalar_as<std::string>(root["algebra"], "algebra");
  if (root["form"]) cfg.form = detail::scalar_as<std::string>(root["form"], "form");
  if (cfg.form != "trace" && cfg.form != "killing") throw ConfigError(line_of(root["form"]), "form", "must be trace or killing");
  if (root["module"]) cfg.module = detail::scalar_as<std::string>(root["module"], "module");
  if (cfg.module != "irreducible" && cfg.module != "defining")
    throw ConfigError(line_of(root["module"]), "module", "must be irreducible or defining");
  Algebra alg;
  try {
    alg = build_algebra(cfg.algebra, cfg.normalization());
  } catch (const Error& e) {
    throw ConfigError(line_of(root["algebra"]), "algebra", e.what());
  }
  cfg.algebra = alg->n == 2 ? "sl2" : "sl" + std::to_string(alg->n);

  if (!root["points"]) throw ConfigError(0, "points", "missing");
  cfg.points = detail::parse_numbers(root["points"], "points");
  if (cfg.points.empty()) throw ConfigError(line_of(root["points"]), "points", "need at least one point");
  for (std::size_t i = 0; i < cfg.points.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (cfg.points[i].value == cfg.points[k].value)
        throw ConfigError(line_of(root["points"][i]), "points",
                          "coincident points z" + std::to_string(k + 1) + " = z" + std::to_string(i + 1) + " = " +
                              cfg.points[i].value.str());

  if (cfg.module == "irreducible") {
    if (alg->n != 2) throw ConfigError(line_of(root["module"]), "module", "irreducible modules by weight need sl2; use defining");
    if (!root["weights"]) throw ConfigError(0, "weights", "missing");
    if (!root["weights"].IsSequence()) throw ConfigError(line_of(root["weights"]), "weights", "expected a list");
    for (const auto& w : root["weights"]) {
      int l = detail::scalar_as<int>(w, "weights");
      if (l < 0) throw ConfigError(line_of(w), "weights", "weights are non-negative integers");
      cfg.weights.push_back(l);
    }
    if (cfg.weights.size() != cfg.points.size())
      throw ConfigError(line_of(root["weights"]), "weights",
                        std::to_string(cfg.weights.size()) + " weights for " + std::to_string(cfg.points.size()) + " points");
  } else if (root["weights"]) {
    throw ConfigError(line_of(root["weights"]), "weights", "not used with defining modules");
  }

  if (root["mu"]) {
    const auto& n = root["mu"];
    if (n.IsScalar())
      cfg.mu = detail::parse_mu_expression(n.Scalar(), *alg, line_of(n));
    else
      cfg.mu = detail::parse_numbers(n, "mu");
    if (cfg.mu.size() != alg->dim())
      throw ConfigError(line_of(n), "mu", "expected " + std::to_string(alg->dim()) + " coordinates");
    for (const auto& c : cfg.mu)
      if (!c.value.is_real()) throw ConfigError(line_of(n), "mu", "coordinates must be real");
    if (cfg.homogeneous()) cfg.mu.clear();
  }
  if (root["subspace"]) cfg.subspace = detail::scalar_as<std::string>(root["subspace"], "subspace");
  if (cfg.subspace != "singular" && cfg.subspace != "full")
    throw ConfigError(line_of(root["subspace"]), "subspace", "must be singular or full");
  if (root["hermitian_required"]) cfg.hermitian_required = detail::scalar_as<bool>(root["hermitian_required"], "hermitian_required");
  if (root["m"]) {
    int m = detail::scalar_as<int>(root["m"], "m");
    if (m < 0) throw ConfigError(line_of(root["m"]), "m", "must be non-negative");
    cfg.m = m;
  }
  if (root["trials"]) cfg.trials = detail::scalar_as<std::size_t>(root["trials"], "trials");
  if (root["seed"]) cfg.seed = detail::scalar_as<std::uint64_t>(root["seed"], "seed");
  if (root["tolerance"]) cfg.tolerance = detail::parse_double(root["tolerance"], "tolerance");
  if (!(cfg.tolerance > 0.0)) throw ConfigError(line_of(root["tolerance"]), "tolerance", "must be positive");
  if (root["threads"]) cfg.threads = detail::scalar_as<unsigned>(root["threads"], "threads");
  if (root["bethe_starts"]) cfg.bethe_starts = detail::scalar_as<std::size_t>(root["bethe_starts"], "bethe_starts");
  if (root["tree"]) {
    cfg.tree = detail::scalar_as<std::string>(root["tree"], "tree");
    try {
      auto t = OperadTree::parse(cfg.tree);
      if (t.num_leaves() != cfg.N())
        throw Error("tree has " + std::to_string(t.num_leaves()) + " leaves for " + std::to_string(cfg.N()) + " points");
      cfg.tree = t.str();
    } catch (const Error& e) {
      throw ConfigError(line_of(root["tree"]), "tree", e.what());
    }
  }
  if (root["collision_s"]) cfg.collision_s = detail::parse_double(root["collision_s"], "collision_s");
  if (root["loops"]) {
    const auto& ls = root["loops"];
    if (!ls.IsSequence()) throw ConfigError(line_of(ls), "loops", "expected a list");
    for (const auto& l : ls) {
      CactusLoop loop;
      if (!l.IsMap() || !l["moves"]) throw ConfigError(line_of(l), "loops", "each loop needs 'moves'");
      loop.name = l["name"] ? detail::scalar_as<std::string>(l["name"], "loops") : "loop" + std::to_string(cfg.loops.size() + 1);
      for (const auto& mv : l["moves"]) {
        if (!mv.IsSequence() || mv.size() != 2) throw ConfigError(line_of(mv), "loops", "a move is a pair [p, q]");
        loop.moves.emplace_back(detail::scalar_as<std::size_t>(mv[0], "loops"), detail::scalar_as<std::size_t>(mv[1], "loops"));
      }
      try {
        if (cactus_closure(cfg.N(), loop.moves) == 0) throw Error("loop '" + loop.name + "' does not close");
      } catch (const Error& e) {
        throw ConfigError(line_of(l), "loops", e.what());
      }
      cfg.loops.push_back(std::move(loop));
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text; parse_config(emit_config(c)) == c.
inline std::string emit_config(const ExperimentConfig& c) {
  auto num = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "algebra" << YAML::Value << c.algebra;
  out << YAML::Key << "form" << YAML::Value << c.form;
  out << YAML::Key << "module" << YAML::Value << c.module;
  if (c.module == "irreducible") {
    out << YAML::Key << "weights" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (int w : c.weights) out << w;
    out << YAML::EndSeq;
  }
  out << YAML::Key << "points" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& p : c.points) out << format_number(p);
  out << YAML::EndSeq;
  if (!c.mu.empty()) {
    out << YAML::Key << "mu" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& p : c.mu) out << format_number(p);
    out << YAML::EndSeq;
  }
  out << YAML::Key << "subspace" << YAML::Value << c.subspace;
  out << YAML::Key << "hermitian_required" << YAML::Value << c.hermitian_required;
  if (c.m) out << YAML::Key << "m" << YAML::Value << *c.m;
  out << YAML::Key << "trials" << YAML::Value << c.trials;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "tolerance" << YAML::Value << num(c.tolerance);
  out << YAML::Key << "threads" << YAML::Value << c.threads;
  out << YAML::Key << "bethe_starts" << YAML::Value << c.bethe_starts;
  if (!c.tree.empty()) out << YAML::Key << "tree" << YAML::Value << YAML::DoubleQuoted << c.tree;
  out << YAML::Key << "collision_s" << YAML::Value << num(c.collision_s);
  if (!c.loops.empty()) {
    out << YAML::Key << "loops" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : c.loops) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << l.name;
      out << YAML::Key << "moves" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (auto [p, q] : l.moves) out << YAML::Flow << YAML::BeginSeq << p << q << YAML::EndSeq;
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

/// FNV-1a of the canonical text, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : emit_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gaudin
