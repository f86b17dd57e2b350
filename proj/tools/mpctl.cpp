// mpctl: run threshold mechanisms on matroid instances from JSON configs.

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "mp/composition.hpp"
#include "mp/ex_ante.hpp"
#include "mp/io.hpp"
#include "mp/mechanisms.hpp"
#include "mp/partition.hpp"

namespace {

using mp::io::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string order;
  std::string out;
  std::string format = "json";
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mp::InputError(path + ": cannot write file");
  f << text;
}

void emit(const Common& c, const std::string& json_text, const std::string& csv_text) {
  const std::string& body = c.format == "csv" ? csv_text : json_text;
  if (c.out.empty()) {
    std::cout << body;
  } else {
    write_file(c.out, body);
  }
}

mp::io::ExperimentConfig load(const Common& c) {
  auto cfg = mp::io::load_config(c.config);
  if (c.trials) {
    if (*c.trials == 0) throw mp::InputError("--trials: must be at least 1");
    cfg.trials = *c.trials;
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.order.empty()) cfg.order = mp::OrderStrategy::parse(c.order);
  if (cfg.dists.empty()) throw mp::InputError("config: missing field 'distributions'");
  if (cfg.mechanism.empty()) throw mp::InputError("config: missing field 'mechanism'");
  return cfg;
}

const mp::DecompositionTree* tree_of(const mp::io::ExperimentConfig& cfg) { return cfg.tree ? &*cfg.tree : nullptr; }

int cmd_simulate(const Common& c) {
  const auto cfg = load(c);
  const auto& m = *cfg.matroid;
  const auto built = mp::io::build_mechanism(cfg.mechanism, m, cfg.dists, tree_of(cfg), cfg.seed);
  mp::SimulateOptions opt;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  opt.order = cfg.order;
  opt.instance = cfg.name;
  const auto report = mp::simulate(m, cfg.dists, *built.mechanism, opt);
  const std::string json_text = mp::io::report_to_json(report, built.details).dump(2) + "\n";
  const std::string csv_text = mp::io::csv_header() + mp::io::csv_row(report);
  emit(c, json_text, csv_text);
  if (!cfg.output_json.empty()) write_file(cfg.output_json, json_text);
  if (!cfg.output_csv.empty()) write_file(cfg.output_csv, csv_text);
  if (!c.out.empty()) {
    std::cerr << report.instance << ": " << report.mechanism << " ratio " << mp::io::format_number(report.empirical_ratio())
              << " claimed 1/" << mp::io::format_number(report.claimed_ratio) << " -> " << report.verdict() << "\n";
  }
  return report.verdict() == "fail" ? kFail : kPass;
}

int cmd_exact(const Common& c) {
  Common cc = c;
  if (cc.order.empty()) cc.order = "exhaustive";
  const auto cfg = load(cc);
  const auto& m = *cfg.matroid;
  const auto built = mp::io::build_mechanism(cfg.mechanism, m, cfg.dists, tree_of(cfg), cfg.seed);
  mp::ExactOptions opt;
  opt.order = cfg.order;
  opt.seed = cfg.seed;
  const auto e = mp::exact_evaluate(m, cfg.dists, *built.mechanism, opt);
  const auto summary = mp::io::exact_report(e, cfg.name, *built.mechanism, cfg.order.name(), cfg.seed);
  const std::string json_text = mp::io::exact_to_json(e, summary, built.details).dump(2) + "\n";
  const std::string csv_text = mp::io::csv_header() + mp::io::csv_row(summary);
  emit(c, json_text, csv_text);
  if (!cfg.output_json.empty()) write_file(cfg.output_json, json_text);
  if (!cfg.output_csv.empty()) write_file(cfg.output_csv, csv_text);
  return summary.verdict() == "fail" ? kFail : kPass;
}

struct CheckLog {
  int failures = 0;
  void ok(const std::string& what) { std::cout << "ok    " << what << "\n"; }
  void fail(const std::string& what, const std::string& detail) {
    ++failures;
    std::cout << "FAIL  " << what << ": " << detail << "\n";
  }
  void skip(const std::string& what, const std::string& why) { std::cout << "skip  " << what << " (" << why << ")\n"; }
};

int cmd_check(const Common& c) {
  const auto cfg = mp::io::load_config(c.config);
  const auto& m = *cfg.matroid;
  CheckLog log;

  if (m.size() <= mp::MatroidInstance::kExplicitMaxItems) {
    if (const auto bad = mp::check_axioms(m)) {
      log.fail("matroid axioms", *bad);
    } else {
      log.ok("matroid axioms");
    }
  } else {
    log.skip("matroid axioms", "more than 12 items");
  }

  if (!cfg.dists.empty() && log.failures == 0) {
    const auto relax = mp::ex_ante(m, cfg.dists, 20000, cfg.seed);
    std::string violation;
    const int n = m.size();
    auto check_set = [&](const mp::ItemSet& s) {
      double total = 0.0;
      for (mp::Item i : s) total += relax.p[i];
      if (total > m.rank(s) + 1e-9 && violation.empty())
        violation = "p(S) = " + mp::io::format_number(total) + " > r(S) = " + std::to_string(m.rank(s));
    };
    if (n <= 12) {
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) check_set(mp::from_mask(mask, n));
    } else {
      mp::Rng rng(cfg.seed, "check/polytope");
      for (int t = 0; t < 2000; ++t) {
        mp::ItemSet s;
        for (int i = 0; i < n; ++i)
          if (rng.coin(0.5)) s.push_back(i);
        check_set(s);
      }
    }
    violation.empty() ? log.ok("ex-ante point in the matroid polytope") : log.fail("matroid polytope", violation);

    const std::string type = cfg.mechanism.value("type", "");
    if (type == "graphic" || type == "multigraph" || type == "k-sparse") {
      try {
        if (m.kind() == mp::MatroidKind::graphic) {
          const auto o = mp::orient_graph(*m.graph(), relax.p);
          const auto loads = mp::orientation_loads(m.graph()->vertices, o, relax.p);
          const double worst = loads.empty() ? 0.0 : *std::max_element(loads.begin(), loads.end());
          worst <= 2 + 1e-9 ? log.ok("orientation loads <= 2")
                            : log.fail("orientation loads", "max load " + mp::io::format_number(worst) + " > 2");
        } else {
          const auto edges = mp::build_hypergraph(m);
          int k = 0, vertices = 0;
          for (const auto& e : edges) {
            k = std::max<int>(k, static_cast<int>(e.size()));
            for (int v : e) vertices = std::max(vertices, v + 1);
          }
          const auto o = mp::orient_hypergraph(vertices, edges, relax.p, k);
          const auto loads = mp::orientation_loads(vertices, o, relax.p);
          const double worst = loads.empty() ? 0.0 : *std::max_element(loads.begin(), loads.end());
          worst <= k + 1e-9 ? log.ok("orientation loads <= " + std::to_string(k))
                            : log.fail("orientation loads", "max load " + mp::io::format_number(worst));
        }
      } catch (const mp::PreconditionError& e) {
        log.fail("orientation", e.what());
      }
    }
  }

  if (cfg.tree) {
    try {
      mp::validate_tree(m, *cfg.tree);
      log.ok("decomposition tree structure");
      for (const auto& et : mp::thickness(m, *cfg.tree)) {
        const std::string name = "thickness of tree edge " + std::to_string(et.edge.u) + "-" + std::to_string(et.edge.v);
        if (cfg.tree_k && et.lambda > *cfg.tree_k) {
          log.fail(name, "lambda = " + std::to_string(et.lambda) + " > k = " + std::to_string(*cfg.tree_k));
        } else {
          log.ok(name + " (lambda = " + std::to_string(et.lambda) + ")");
        }
      }
      if (cfg.mechanism.value("type", "") == "regular") {
        mp::validate_seymour_tree(m, *cfg.tree);
        log.ok("Seymour tree");
      }
    } catch (const mp::PreconditionError& e) {
      log.fail("decomposition tree", e.what());
    } catch (const mp::InputError& e) {
      log.fail("decomposition tree", e.what());
    }
  }
  return log.failures == 0 ? kPass : kFail;
}

mp::MatroidInstance instance_matroid(const std::string& path) {
  const json j = mp::io::read_json_file(path);
  if (j.is_object() && j.contains("matroid")) return mp::io::matroid_from_json(j["matroid"], "matroid");
  return mp::io::matroid_from_json(j, "matroid");
}

int cmd_partition(const Common& c, int k) {
  const auto m = instance_matroid(c.config);
  if (k < 1) throw mp::InputError("--k: must be positive");
  const auto r = mp::partition_into_independent_sets(m, k);
  if (!r.feasible) {
    std::cout << "infeasible: |S| = " << r.violating_set.size() << " > " << k << " * r(S) = " << k * m.rank(r.violating_set)
              << "\nwitness S = " << json(r.violating_set).dump() << "\n";
    return kFail;
  }
  bool ok = true;
  std::set<mp::Item> seen;
  for (std::size_t i = 0; i < r.parts.size(); ++i) {
    const bool indep = m.is_independent(r.parts[i]);
    ok = ok && indep;
    for (mp::Item x : r.parts[i]) ok = ok && seen.insert(x).second;
    std::cout << "part " << i << ": " << json(r.parts[i]).dump() << (indep ? "" : "  (NOT independent)") << "\n";
  }
  if (!r.loops.empty()) std::cout << "loops: " << json(r.loops).dump() << "\n";
  const bool covers = seen.size() + r.loops.size() == static_cast<std::size_t>(m.size());
  ok = ok && covers;
  std::cout << (ok ? "verified: parts are disjoint, independent and cover every non-loop\n"
                   : "verification FAILED\n");
  return ok ? kPass : kFail;
}

int cmd_orient(const Common& c, const std::string& p_path) {
  const auto m = instance_matroid(c.config);
  const json pj = mp::io::read_json_file(p_path);
  if (!pj.is_array() || static_cast<int>(pj.size()) != m.size())
    throw mp::InputError(p_path + ": expected an array of " + std::to_string(m.size()) + " numbers");
  std::vector<double> p;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    if (!pj[i].is_number()) throw mp::InputError(p_path + "[" + std::to_string(i) + "]: expected a number");
    p.push_back(pj[i].get<double>());
  }
  int vertices = 0;
  double bound = 2.0;
  std::vector<std::vector<int>> edges;
  if (const mp::Graph* g = m.graph(); g && m.kind() == mp::MatroidKind::graphic) {
    vertices = g->vertices;
    for (auto [u, v] : g->edges) edges.push_back(u == v ? std::vector<int>{u} : std::vector<int>{u, v});
  } else if (m.vectors()) {
    edges = mp::build_hypergraph(m);
    vertices = m.vectors()->dim;
    bound = std::max(1, m.vectors()->max_support());
  } else {
    throw mp::InputError("orient needs a graphic or vector matroid");
  }
  mp::Orientation o;
  try {
    o = mp::orient_hypergraph(vertices, edges, p, bound);
  } catch (const mp::PreconditionError& e) {
    std::cout << "infeasible: " << e.what() << "\n";
    return kFail;
  }
  const auto loads = mp::orientation_loads(vertices, o, p);
  for (std::size_t e = 0; e < edges.size(); ++e) std::cout << "edge " << e << " -> head " << o.head[e] << "\n";
  double worst = 0.0;
  for (int v = 0; v < vertices; ++v) {
    std::cout << "load " << v << " = " << mp::io::format_number(loads[v]) << "\n";
    worst = std::max(worst, loads[v]);
  }
  const bool ok = worst <= bound + 1e-9;
  std::cout << (ok ? "verified: " : "FAILED: ") << "max load " << mp::io::format_number(worst) << " <= "
            << mp::io::format_number(bound) << "\n";
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpctl: non-adaptive threshold mechanisms for matroid prophet inequalities"};
  app.require_subcommand(1);
  app.footer(
      "CSV columns (fixed order): instance, mechanism, order, trials, seed, gambler_mean,\n"
      "gambler_stderr, prophet_mean, prophet_stderr, ratio, claimed_alpha, verdict.\n"
      "Exit codes: 0 pass, 1 verdict or invariant failure, 2 input error. MP_THREADS caps workers.");

  Common common;
  auto add_common = [&](CLI::App* sub, bool run_flags) {
    sub->add_option("--config", common.config, "Experiment or instance JSON")->required();
    if (!run_flags) return;
    sub->add_option("--trials", common.trials, "Override trial count");
    sub->add_option("--seed", common.seed, "Override seed");
    sub->add_option("--order", common.order, "adversarial | random | exhaustive | fixed:i,j,...");
    sub->add_option("--out", common.out, "Write the report here instead of stdout");
    sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run with a 3-sigma verdict");
  add_common(simulate, true);
  auto* exact = app.add_subcommand("exact", "Exact evaluation on finite laws (default order: exhaustive)");
  add_common(exact, true);
  auto* check = app.add_subcommand("check", "Structural validation only");
  add_common(check, false);
  int k = 0;
  auto* partition = app.add_subcommand("partition", "Cover the matroid with k independent sets");
  add_common(partition, false);
  partition->add_option("--k", k, "Number of parts")->required();
  std::string p_path;
  auto* orient = app.add_subcommand("orient", "Orient edges so each vertex has fractional in-degree within the bound");
  add_common(orient, false);
  orient->add_option("--p", p_path, "JSON array with one probability per item")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*exact) return cmd_exact(common);
    if (*check) return cmd_check(common);
    if (*partition) return cmd_partition(common, k);
    if (*orient) return cmd_orient(common, p_path);
  } catch (const mp::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const mp::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kFail;
  } catch (const mp::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kInputError;
}
