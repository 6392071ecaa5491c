#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gaudin/all.hpp"
#include "gaudin/config.hpp"

using namespace gaudin;
using json = nlohmann::ordered_json;

namespace {

constexpr int schema_version = 1;
constexpr double collision_deviation_tol = 1e-6;
constexpr double collision_ratio_tol = 0.6;
constexpr double cyclic_fraction = 0.9;

enum Exit { pass = 0, operational = 1, failed = 2 };

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  json results = json::object();
  bool verdict = true;
  std::string message;
  std::vector<Table> tables;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json cjson(Complex c) { return json::array({c.real(), c.imag()}); }

json tuple_json(const std::vector<Complex>& v) {
  json a = json::array();
  for (auto c : v) a.push_back(cjson(c));
  return a;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_text(const Table& t) {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream os;
  for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << cell(t.header[k]);
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell(r[k]);
    os << "\n";
  }
  return os.str();
}

std::string moves_string(const CactusLoop& l) {
  std::string s;
  for (auto [p, q] : l.moves) s += (s.empty() ? "" : " ") + std::to_string(p) + "-" + std::to_string(q);
  return s;
}

struct Setup {
  ExperimentConfig cfg;
  Algebra alg;
  TensorSpace space;
  bool sl2() const { return alg->n == 2; }
};

TensorSpace make_space(const ExperimentConfig& cfg, const Algebra& alg) {
  if (cfg.module == "defining") return defining_tensor_space(alg, cfg.N());
  return sl2_tensor_space(alg, cfg.weights);
}

void require_sl2(const Setup& s, const std::string& command) {
  if (!s.sl2() || s.cfg.module != "irreducible")
    throw Error(command + " needs algebra sl2 with irreducible modules given by weights");
}

void require_invariant_subspace(const Setup& s) {
  if (s.cfg.subspace == "singular" && !s.cfg.homogeneous())
    throw Error("a nonzero mu does not preserve the singular subspace; use subspace: full");
}

SpectralTolerances spectral_tol(const ExperimentConfig& cfg) {
  SpectralTolerances tol;
  tol.residual = cfg.tolerance;
  tol.hermitian = cfg.tolerance;
  tol.commutator = cfg.tolerance;
  return tol;
}

// ---------------------------------------------------------------------------

template <Field S>
Outcome commute_with(const Setup& s, const std::vector<S>& z) {
  Outcome o;
  GaudinParams<S> p(s.alg, z, s.cfg.mu_element(*s.alg));
  auto gens = generator_set(p, s.space, s.sl2());
  std::size_t pairs = 0, nonzero = 0;
  double worst = 0.0;
  Table t{"commutators.csv", {"a", "b", "relative_norm"}, {}};
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = a + 1; b < gens.size(); ++b) {
      ++pairs;
      auto c = commutator(gens.ops[a], gens.ops[b]);
      double scale = std::max(gens.ops[a].frobenius_norm() * gens.ops[b].frobenius_norm(), 1e-300);
      double rel = c.frobenius_norm() / scale;
      worst = std::max(worst, rel);
      bool bad = is_exact_v<S> ? !c.is_zero() : rel > s.cfg.tolerance;
      if (bad) ++nonzero;
      t.rows.push_back({gens.labels[a], gens.labels[b], fmt(rel)});
    }
  o.results["field"] = is_exact_v<S> ? "exact" : "float";
  o.results["dimension"] = s.space.dim();
  o.results["generators"] = gens.labels;
  o.results["pairs"] = pairs;
  o.results["failing_pairs"] = nonzero;
  o.results["max_relative_commutator"] = worst;
  o.verdict = nonzero == 0;
  if (o.verdict)
    o.message = is_exact_v<S> ? "all commutators zero (exact)" : "all commutators below tolerance " + fmt(s.cfg.tolerance);
  else
    o.message = std::to_string(nonzero) + " of " + std::to_string(pairs) + " commutators nonzero";
  o.tables.push_back(std::move(t));
  return o;
}

Outcome cmd_commute(const Setup& s) {
  if (s.cfg.float_pipeline()) return commute_with<Complex>(s, s.cfg.complex_points());
  return commute_with<QQ>(s, s.cfg.exact_points());
}

struct NumericFamily {
  GeneratorSet<Complex> gens;
  Subspace<Complex> sub;
  Eigen::MatrixXcd gram;
};

NumericFamily numeric_family(const Setup& s) {
  require_invariant_subspace(s);
  GaudinParams<Complex> p(s.alg, s.cfg.complex_points(), s.cfg.mu_element(*s.alg));
  auto all = generator_set(p, s.space, s.sl2());
  NumericFamily f;
  if (s.cfg.subspace == "singular") {
    f.sub = singular_subspace(s.space).convert<Complex>();
    f.gens = all.restricted(f.sub);
    f.gram = subspace_gram(s.space, f.sub);
  } else {
    f.sub = Subspace<Complex>::whole(s.space.dim());
    f.gens = std::move(all);
    f.gram = s.space.gram();
  }
  return f;
}

Table spectrum_table(const JointSpectrum& spec) {
  Table t{"spectrum.csv", {"space", "multiplicity", "generator", "re", "im", "residual"}, {}};
  for (std::size_t k = 0; k < spec.spaces.size(); ++k)
    for (std::size_t g = 0; g < spec.labels.size(); ++g)
      t.rows.push_back({std::to_string(k), std::to_string(spec.spaces[k].multiplicity), spec.labels[g],
                        fmt(spec.spaces[k].values[g].real()), fmt(spec.spaces[k].values[g].imag()),
                        fmt(spec.spaces[k].residual)});
  return t;
}

Outcome cmd_spectrum(const Setup& s) {
  const bool real = s.cfg.real_points();
  if (s.cfg.hermitian_required && !real) throw Error("Hermiticity unavailable for non-real parameters");
  Outcome o;
  auto f = numeric_family(s);
  auto tol = spectral_tol(s.cfg);
  JointSpectrum spec;
  std::string method = "hermitian";
  std::vector<Eigen::MatrixXcd> dense;
  for (const auto& op : f.gens.ops) dense.push_back(op.to_dense());
  bool hermitian = real;
  if (hermitian)
    for (const auto& a : dense)
      if (hermitian_check(a, f.gram) > tol.hermitian) hermitian = false;
  if (hermitian) {
    spec = joint_diagonalize(dense, f.gram, f.gens.labels, tol);
  } else {
    if (s.cfg.hermitian_required) throw Error("generators are not Hermitian for the Gram form; drop hermitian_required");
    method = "generic";
    spec = generic_spectrum(dense, f.gens.labels, s.cfg.seed);
  }
  auto simple = simple_spectrum(spec, tol);
  o.results["method"] = method;
  o.results["subspace"] = s.cfg.subspace;
  o.results["dimension"] = f.sub.dim();
  o.results["generators"] = f.gens.labels;
  o.results["eigenspaces"] = spec.spaces.size();
  o.results["simple"] = simple.simple;
  o.results["indeterminate"] = simple.indeterminate;
  o.results["min_gap"] = std::isfinite(simple.min_gap) ? json(simple.min_gap) : json(nullptr);
  o.results["max_residual"] = spec.max_residual();
  json tuples = json::array();
  for (const auto& sp : spec.spaces) tuples.push_back(tuple_json(sp.values));
  o.results["tuples"] = tuples;
  bool residual_ok = spec.max_residual() <= std::max(tol.residual, 1e-8);
  o.verdict = simple.simple && residual_ok;
  o.message = simple.simple ? "simple spectrum, min gap " + fmt(simple.min_gap)
              : simple.indeterminate ? "indeterminate: smallest gap " + fmt(simple.min_gap) + " lies between the split floor and the distinctness threshold"
                                     : "spectrum is not simple";
  if (!residual_ok) o.message += "; eigenvector residual " + fmt(spec.max_residual());
  o.tables.push_back(spectrum_table(spec));
  return o;
}

template <Field S>
CyclicityReport cyclic_with(const Setup& s, const std::vector<S>& z) {
  require_invariant_subspace(s);
  GaudinParams<S> p(s.alg, z, s.cfg.mu_element(*s.alg));
  auto gens = generator_set(p, s.space, s.sl2());
  Subspace<S> sub;
  if (s.cfg.subspace == "singular") {
    if constexpr (is_exact_v<S>)
      sub = singular_subspace(s.space);
    else
      sub = singular_subspace(s.space).convert<Complex>();
  } else {
    sub = Subspace<S>::whole(s.space.dim());
  }
  return is_cyclic(gens, sub, s.cfg.trials, s.cfg.seed, std::min(s.cfg.tolerance, 1e-8));
}

Outcome cmd_cyclicity(const Setup& s) {
  Outcome o;
  auto rep = s.cfg.float_pipeline() ? cyclic_with<Complex>(s, s.cfg.complex_points()) : cyclic_with<QQ>(s, s.cfg.exact_points());
  Table t{"cyclicity.csv", {"trial", "closure_dim", "target"}, {}};
  for (std::size_t k = 0; k < rep.achieved.size(); ++k)
    t.rows.push_back({std::to_string(k), std::to_string(rep.achieved[k]), std::to_string(rep.target)});
  o.results["field"] = s.cfg.float_pipeline() ? "float" : "exact";
  o.results["subspace"] = s.cfg.subspace;
  o.results["target"] = rep.target;
  o.results["max_closure"] = rep.max_achieved();
  o.results["attained_max"] = rep.attained_max;
  o.results["trials"] = rep.achieved.size();
  o.results["closure_dims"] = rep.achieved;
  bool enough = static_cast<double>(rep.attained_max) >= cyclic_fraction * static_cast<double>(rep.achieved.size());
  o.verdict = rep.verdict && enough;
  o.message = rep.verdict ? "cyclic: closure dimension " + std::to_string(rep.target) + " reached by " +
                                std::to_string(rep.attained_max) + "/" + std::to_string(rep.achieved.size()) + " seeds"
                          : "not cyclic: largest closure " + std::to_string(rep.max_achieved()) + " < " +
                                std::to_string(rep.target);
  o.tables.push_back(std::move(t));
  return o;
}

BetheOptions bethe_options(const ExperimentConfig& cfg) {
  BetheOptions b;
  b.starts = cfg.bethe_starts;
  b.seed = cfg.seed;
  b.threads = cfg.threads;
  return b;
}

Outcome cmd_bethe(const Setup& s) {
  require_sl2(s, "bethe");
  if (!s.cfg.homogeneous()) throw Error("bethe needs mu = 0");
  Outcome o;
  auto z = s.cfg.complex_points();
  int total = 0;
  for (int l : s.cfg.weights) total += l;
  std::vector<std::size_t> ms;
  if (s.cfg.m) {
    if (2 * *s.cfg.m > total) throw Error("m = " + std::to_string(*s.cfg.m) + " exceeds half the total weight");
    ms.push_back(static_cast<std::size_t>(*s.cfg.m));
  } else {
    for (int m = 0; 2 * m <= total; ++m) ms.push_back(static_cast<std::size_t>(m));
  }
  Table t{"bethe_roots.csv", {"m", "solution", "root", "re", "im", "residual"}, {}};
  json sectors = json::array();
  for (auto m : ms) {
    int nu = total - 2 * static_cast<int>(m);
    auto expected = singular_subspace_sl2(s.space, nu).dim();
    auto sols = solve_bethe(z, s.cfg.weights, m, bethe_options(s.cfg));
    std::size_t valid = 0;
    json list = json::array();
    for (std::size_t k = 0; k < sols.size(); ++k) {
      bool ok = false;
      double worst = 0.0;
      try {
        auto op = miura_oper(sols[k], z, s.cfg.weights);
        auto mono = monodromy_report(op, s.cfg.tolerance);
        for (const auto& ob : mono.points) worst = std::max(worst, ob.relative);
        ok = residue_check(op, s.cfg.weights) && mono.verdict;
      } catch (const Error&) {
      }
      if (ok) ++valid;
      json roots = json::array();
      for (std::size_t r = 0; r < sols[k].roots.size(); ++r) {
        roots.push_back(cjson(sols[k].roots[r]));
        t.rows.push_back({std::to_string(m), std::to_string(k), std::to_string(r), fmt(sols[k].roots[r].real()),
                          fmt(sols[k].roots[r].imag()), fmt(sols[k].residual)});
      }
      list.push_back({{"roots", roots}, {"residual", sols[k].residual}, {"max_obstruction", worst}, {"oper_ok", ok}});
    }
    bool sector_ok = valid == sols.size() && sols.size() == expected;
    o.verdict = o.verdict && sector_ok;
    sectors.push_back({{"m", m}, {"nu", nu}, {"singular_dim", expected}, {"solutions", sols.size()},
                       {"validated", valid}, {"ok", sector_ok}, {"configs", list}});
  }
  o.results["sectors"] = sectors;
  o.message = o.verdict ? "every sector has dim V^sing validated Bethe solutions"
                        : "a sector has missing or invalid Bethe solutions";
  o.tables.push_back(std::move(t));
  return o;
}

Outcome cmd_oper(const Setup& s) {
  require_sl2(s, "oper-check");
  if (!s.cfg.homogeneous()) throw Error("oper-check needs mu = 0");
  if (s.cfg.subspace != "singular") throw Error("oper-check works on the singular subspace");
  Outcome o;
  auto f = numeric_family(s);
  auto z = s.cfg.complex_points();
  auto tol = spectral_tol(s.cfg);
  auto spec = s.cfg.real_points() ? joint_diagonalize(f.gens, f.gram, tol)
                                  : generic_spectrum([&] {
                                      std::vector<Eigen::MatrixXcd> d;
                                      for (const auto& op : f.gens.ops) d.push_back(op.to_dense());
                                      return d;
                                    }(), f.gens.labels, s.cfg.seed);
  auto cal = calibrate(*s.alg);
  Table t{"opers.csv", {"eigenvector", "point", "weight", "a", "c_re", "c_im", "obstruction"}, {}};
  json opers = json::array();
  std::size_t k = 0, good = 0;
  double worst = 0.0;
  for (const auto& chi : genfn_eigenvalues(spec, z.size())) {
    auto op = oper_from_eigenvalue(chi, z, s.cfg.weights, cal);
    bool res = residue_check(op, s.cfg.weights);
    auto mono = monodromy_report(op, s.cfg.tolerance, true);
    json c = json::array(), ob = json::array();
    for (std::size_t i = 0; i < z.size(); ++i) {
      c.push_back(cjson(op.c[i]));
      ob.push_back(mono.points[i].relative);
      worst = std::max(worst, mono.points[i].relative);
      t.rows.push_back({std::to_string(k), std::to_string(i + 1), std::to_string(s.cfg.weights[i]), op.a[i].get_str(),
                        fmt(op.c[i].real()), fmt(op.c[i].imag()), fmt(mono.points[i].relative)});
    }
    json entry{{"accessory", c}, {"residues_exact", res}, {"obstruction", ob}, {"monodromy_free", mono.verdict}};
    if (mono.infinity) {
      const auto& inf = *mono.infinity;
      entry["infinity"] = {{"weight", inf.integral ? json(inf.weight) : json(nullptr)},
                           {"obstruction", inf.integral ? json(inf.obstruction.relative) : json(nullptr)},
                           {"trivial", inf.trivial}};
    }
    opers.push_back(entry);
    if (res && mono.verdict) ++good;
    ++k;
  }
  o.results["opers"] = opers;
  o.results["count"] = k;
  o.results["monodromy_free"] = good;
  o.results["max_obstruction"] = worst;
  o.verdict = good == k;
  o.message = std::to_string(good) + "/" + std::to_string(k) + " eigen-opers have exact residues and trivial monodromy";
  o.tables.push_back(std::move(t));
  return o;
}

Outcome cmd_bijection(const Setup& s) {
  require_sl2(s, "bijection-count");
  if (!s.cfg.homogeneous()) throw Error("bijection-count needs mu = 0");
  Outcome o;
  BijectionOptions opt;
  opt.bethe = bethe_options(s.cfg);
  opt.spectral = spectral_tol(s.cfg);
  opt.obstruction_tol = s.cfg.tolerance;
  auto rep = count_bijection(s.alg, s.cfg.complex_points(), s.cfg.weights, opt);
  Table t{"sectors.csv", {"nu", "m", "singular_dim", "eigen_count", "bethe_count", "matched", "incomplete"}, {}};
  json sectors = json::array();
  std::string table;
  for (const auto& sec : rep.sectors) {
    t.rows.push_back({std::to_string(sec.nu), std::to_string(sec.m), std::to_string(sec.singular_dim),
                      std::to_string(sec.eigen_count), std::to_string(sec.bethe_count), std::to_string(sec.matched),
                      sec.incomplete ? "1" : "0"});
    sectors.push_back({{"nu", sec.nu}, {"m", sec.m}, {"singular_dim", sec.singular_dim}, {"eigen_count", sec.eigen_count},
                       {"bethe_count", sec.bethe_count}, {"matched", sec.matched}, {"incomplete", sec.incomplete}});
    if (sec.singular_dim == 0 && sec.bethe_count == 0) continue;
    table += (table.empty() ? "" : ", ") + std::to_string(sec.eigen_count) + "/" + std::to_string(sec.bethe_count);
  }
  o.results["sectors"] = sectors;
  o.results["eigen_total"] = rep.eigen_total;
  o.results["bethe_total"] = rep.bethe_total;
  o.results["eigen_opers_monodromy_free"] = rep.all_eigen_opers_monodromy_free;
  o.verdict = rep.verdict;
  bool incomplete = std::any_of(rep.sectors.begin(), rep.sectors.end(), [](const SectorCount& c) { return c.incomplete; });
  o.message = "eigen/bethe per sector: " + table + (rep.verdict ? "" : incomplete ? " (incomplete search)" : " (mismatch)");
  o.tables.push_back(std::move(t));
  return o;
}

Outcome cmd_limit(const Setup& s) {
  require_sl2(s, "limit");
  Outcome o;
  std::vector<OperadTree> trees;
  if (!s.cfg.tree.empty())
    trees.push_back(OperadTree::parse(s.cfg.tree));
  else
    trees = boundary_trees(s.cfg.N());
  for (const auto& tr : trees)
    if (!tr.real()) throw Error("Hermiticity unavailable for non-real parameters");
  auto suite = limit_catalog_suite(trees, s.alg, s.cfg.weights, s.cfg.trials, s.cfg.seed, s.cfg.threads);
  Table t{"limit.csv",
          {"tree", "shape", "generators", "sing_dim", "commutative", "max_closure", "attained_max", "simple", "min_gap",
           "collision_deviation", "collision_ratio", "flat", "error"},
          {}};
  json list = json::array();
  std::size_t passed = 0;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const auto& r = suite[k];
    json entry{{"tree", r.tree}, {"shape", r.shape}};
    bool ok = r.passes();
    std::string dev = "", ratio = "", flat = "";
    if (r.error.empty()) {
      entry["generators"] = r.generators;
      entry["sing_dim"] = r.sing_dim;
      entry["commutative_exact"] = r.commutative;
      entry["cyclic"] = r.cyclic.verdict;
      entry["simple"] = r.simple.simple;
      entry["min_gap"] = std::isfinite(r.simple.min_gap) ? json(r.simple.min_gap) : json(nullptr);
      if (trees[k].height() > 1) {
        auto c = collision_limit_check(trees[k], make_space(s.cfg, s.alg), s.cfg.collision_s);
        bool cok = c.passes(collision_deviation_tol, collision_ratio_tol);
        entry["collision"] = {{"s", c.s}, {"exponents", c.exponents}, {"raw_deviation", c.raw_deviation},
                              {"deviation", c.deviation}, {"ratio", c.ratio}, {"limit_in_span", c.limit_in_span},
                              {"spans_limit", c.spans_limit}, {"flat_ranks", c.flat_ranks}, {"pass", cok}};
        ok = ok && cok;
        dev = fmt(c.deviation);
        ratio = fmt(c.ratio);
        flat = c.flat ? "1" : "0";
      }
    } else {
      entry["error"] = r.error;
    }
    entry["pass"] = ok;
    if (ok) ++passed;
    list.push_back(entry);
    t.rows.push_back({r.tree, r.shape, std::to_string(r.generators), std::to_string(r.sing_dim), r.commutative ? "1" : "0",
                      std::to_string(r.cyclic.max_achieved()), std::to_string(r.cyclic.attained_max),
                      r.simple.simple ? "1" : "0", std::isfinite(r.simple.min_gap) ? fmt(r.simple.min_gap) : "",
                      dev, ratio, flat, r.error});
  }
  o.results["trees"] = list;
  o.verdict = passed == trees.size();
  o.message = std::to_string(passed) + "/" + std::to_string(trees.size()) +
              " limit algebras commutative, cyclic and simple on V^sing";
  o.tables.push_back(std::move(t));
  return o;
}

Outcome cmd_cover(const Setup& s) {
  require_sl2(s, "cover");
  Outcome o;
  auto loops = s.cfg.loops.empty() ? cactus_catalog(s.cfg.N()) : s.cfg.loops;
  auto rs = cactus_loop_suite(s.cfg.N(), s.alg, s.cfg.weights, loops, {}, s.cfg.threads);
  Table t{"permutations.csv",
          {"loop", "moves", "orientation", "permutation", "halved_permutation", "steps", "rejected", "min_gap",
           "min_overlap", "step_robust", "path_hash", "error"},
          {}};
  json list = json::array();
  std::size_t good = 0;
  for (const auto& r : rs) {
    list.push_back({{"loop", r.loop.name}, {"moves", moves_string(r.loop)}, {"orientation", r.orientation},
                    {"permutation", r.result.permutation}, {"halved_permutation", r.halved.permutation},
                    {"steps", r.result.steps}, {"min_gap", r.result.min_gap}, {"min_overlap", r.result.min_overlap},
                    {"min_join_overlap", r.result.min_join_overlap}, {"step_robust", r.step_robust},
                    {"path_hash", r.result.path_hash}, {"error", r.error}});
    t.rows.push_back({r.loop.name, moves_string(r.loop), std::to_string(r.orientation),
                      permutation_string(r.result.permutation), permutation_string(r.halved.permutation),
                      std::to_string(r.result.steps), std::to_string(r.result.rejected), fmt(r.result.min_gap),
                      fmt(r.result.min_overlap), r.step_robust ? "1" : "0", r.result.path_hash, r.error});
    if (r.ok()) ++good;
  }
  o.results["dimension"] = EigenlineTracker(s.alg, s.cfg.weights).dim();
  o.results["loops"] = list;
  o.verdict = good == rs.size();
  o.message = std::to_string(good) + "/" + std::to_string(rs.size()) + " loops tracked with step-robust permutations";
  o.tables.push_back(std::move(t));
  return o;
}

const std::map<std::string, Outcome (*)(const Setup&)>& commands() {
  static const std::map<std::string, Outcome (*)(const Setup&)> m{
      {"commute-check", cmd_commute}, {"spectrum", cmd_spectrum}, {"cyclicity", cmd_cyclicity},
      {"bethe", cmd_bethe},           {"oper-check", cmd_oper},   {"bijection-count", cmd_bijection},
      {"limit", cmd_limit},           {"cover", cmd_cover}};
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaudin algebra experiments"};
  std::string command, config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<unsigned> threads;
  std::vector<std::string> names;
  for (const auto& [k, v] : commands()) names.push_back(k);
  app.add_option("command", command, "one of: commute-check spectrum cyclicity bethe oper-check bijection-count limit cover")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "experiment file")->required();
  app.add_option("--out", out_dir, "directory for report.json and CSV tables");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--tol", tol, "overrides the config tolerance");
  app.add_option("--threads", threads, "overrides the config thread count");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : Exit::operational;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    auto cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (tol) {
      if (!(*tol > 0.0)) throw Error("--tol must be positive");
      cfg.tolerance = *tol;
    }
    if (threads) cfg.threads = std::max(1u, *threads);
    auto alg = build_algebra(cfg.algebra, cfg.normalization());
    Setup s{cfg, alg, make_space(cfg, alg)};

    Outcome o;
    try {
      o = commands().at(command)(s);
    } catch (const Error& e) {
      std::cerr << "gaudin-lab " << command << ": " << e.what() << "\n";
      return Exit::operational;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json report;
    report["schema_version"] = schema_version;
    report["library_version"] = library_version;
    report["command"] = command;
    report["config_hash"] = config_hash(s.cfg);
    report["seed"] = s.cfg.seed;
    report["tolerance"] = s.cfg.tolerance;
    report["threads"] = s.cfg.threads;
    report["pipeline"] = s.cfg.float_pipeline() ? "float" : "exact";
    report["config"] = emit_config(s.cfg);
    report["verdict"] = o.verdict ? "pass" : "fail";
    report["message"] = o.message;
    report["results"] = o.results;
    json tables = json::array();
    for (const auto& t : o.tables) tables.push_back(t.name);
    report["tables"] = tables;
    report["wall_time_s"] = wall;

    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& t : o.tables) write_atomic(dir / t.name, csv_text(t));
    write_atomic(dir / "report.json", report.dump(2) + "\n");

    std::cout << command << ": " << (o.verdict ? "PASS" : "FAIL") << ": " << o.message << "\n";
    return o.verdict ? Exit::pass : Exit::failed;
  } catch (const std::exception& e) {
    std::cerr << "gaudin-lab: " << e.what() << "\n";
    return Exit::operational;
  }
}
