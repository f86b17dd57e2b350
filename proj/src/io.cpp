#include "mp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mp/ex_ante.hpp"
#include "mp/mechanisms.hpp"
#include "mp/rng.hpp"

namespace mp::io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string sub(const std::string& where, const char* key) { return where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

long long as_int(const json& j, const std::string& where) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long long>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  bad(where, "expected an integer");
}

std::uint64_t as_u64(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = as_int(j, where);
  if (v < 0) bad(where, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

double as_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  bad(where, "expected a number");
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  return j;
}

std::vector<int> int_list(const json& j, const std::string& where) {
  std::vector<int> out;
  const auto& a = as_array(j, where);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(static_cast<int>(as_int(a[i], at(where, i))));
  return out;
}

std::vector<double> double_list(const json& j, const std::string& where) {
  std::vector<double> out;
  const auto& a = as_array(j, where);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_double(a[i], at(where, i)));
  return out;
}

std::vector<gf::Vec> columns_from_json(const json& j, const std::string& where) {
  std::vector<gf::Vec> cols;
  const auto& a = as_array(j, where);
  for (std::size_t i = 0; i < a.size(); ++i) cols.push_back(int_list(a[i], at(where, i)));
  return cols;
}

/// Re-throws library InputErrors with a location prefix.
template <class F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw InputError(where + ": " + msg);
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json relaxation_json(const ExAnteRelaxation& r) {
  return {{"p", r.p}, {"tau", r.tau}, {"theta", r.theta}, {"t", r.t}, {"exact", r.exact},
          {"samples", r.sample_count}, {"bound", r.bound()}};
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

Graph graph_from_json(const json& j, const std::string& where) {
  Graph g;
  g.vertices = static_cast<int>(as_int(field(j, "vertices", where), sub(where, "vertices")));
  const auto& edges = as_array(field(j, "edges", where), sub(where, "edges"));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto e = int_list(edges[i], at(sub(where, "edges"), i));
    if (e.size() != 2) bad(at(sub(where, "edges"), i), "expected [u, v]");
    g.edges.push_back({e[0], e[1]});
  }
  located(where, [&] {
    g.validate();
    return 0;
  });
  return g;
}

MatroidInstance matroid_from_json(const json& j, const std::string& where) {
  const std::string kind = as_string(field(j, "kind", where), sub(where, "kind"));
  MatroidInstance m = located(where, [&]() -> MatroidInstance {
    if (kind == "graphic") return MatroidInstance::graphic(graph_from_json(j, where));
    if (kind == "cographic") return MatroidInstance::cographic(graph_from_json(j, where));
    if (kind == "uniform") {
      return MatroidInstance::uniform(static_cast<int>(as_int(field(j, "n", where), sub(where, "n"))),
                                      static_cast<int>(as_int(field(j, "k", where), sub(where, "k"))));
    }
    if (kind == "vector") {
      const int p = j.contains("p") ? static_cast<int>(as_int(j["p"], sub(where, "p"))) : 2;
      const int dim = j.contains("dim") ? static_cast<int>(as_int(j["dim"], sub(where, "dim"))) : -1;
      return MatroidInstance::vector(p, columns_from_json(field(j, "columns", where), sub(where, "columns")), dim);
    }
    if (kind == "explicit") {
      std::vector<ItemSet> bases;
      const auto& a = as_array(field(j, "bases", where), sub(where, "bases"));
      for (std::size_t i = 0; i < a.size(); ++i) bases.push_back(int_list(a[i], at(sub(where, "bases"), i)));
      return MatroidInstance::explicit_bases(static_cast<int>(as_int(field(j, "n", where), sub(where, "n"))),
                                             std::move(bases));
    }
    bad(sub(where, "kind"), "unknown matroid kind '" + kind + "' (graphic, cographic, uniform, vector, explicit)");
  });
  if (j.contains("labels")) {
    std::vector<std::string> labels;
    const auto& a = as_array(j["labels"], sub(where, "labels"));
    for (std::size_t i = 0; i < a.size(); ++i) labels.push_back(as_string(a[i], at(sub(where, "labels"), i)));
    located(sub(where, "labels"), [&] {
      m.set_labels(std::move(labels));
      return 0;
    });
  }
  return m;
}

json matroid_to_json(const MatroidInstance& m) {
  json j{{"kind", to_string(m.kind())}, {"n", m.size()}, {"rank", m.full_rank()}};
  if (const Graph* g = m.graph()) {
    j["vertices"] = g->vertices;
    json edges = json::array();
    for (auto [u, v] : g->edges) edges.push_back({u, v});
    j["edges"] = edges;
  }
  if (const auto* v = m.vectors()) {
    j["p"] = v->p;
    j["dim"] = v->dim;
    j["columns"] = v->columns;
  }
  if (const auto* u = m.uniform_params()) j["k"] = u->k;
  if (const auto* e = m.explicit_params()) j["bases"] = e->bases;
  return j;
}

Distribution distribution_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Distribution::point(j.get<double>());
  const std::string type = as_string(field(j, "type", where), sub(where, "type"));
  return located(where, [&]() -> Distribution {
    if (type == "point") return Distribution::point(as_double(field(j, "value", where), sub(where, "value")));
    if (type == "discrete") {
      return Distribution::discrete(double_list(field(j, "values", where), sub(where, "values")),
                                    double_list(field(j, "probs", where), sub(where, "probs")));
    }
    if (type == "uniform") {
      return Distribution::uniform(as_double(field(j, "lo", where), sub(where, "lo")),
                                   as_double(field(j, "hi", where), sub(where, "hi")));
    }
    if (type == "exponential")
      return Distribution::exponential(as_double(field(j, "rate", where), sub(where, "rate")));
    if (type == "pareto") {
      return Distribution::pareto(as_double(field(j, "shape", where), sub(where, "shape")),
                                  as_double(field(j, "cap", where), sub(where, "cap")));
    }
    bad(sub(where, "type"), "unknown distribution '" + type + "' (point, discrete, uniform, exponential, pareto)");
  });
}

std::vector<Distribution> distributions_from_json(const json& j, int n, const std::string& where) {
  std::vector<Distribution> out;
  if (j.is_object() && j.contains("all")) {
    const auto d = distribution_from_json(j["all"], sub(where, "all"));
    out.assign(static_cast<std::size_t>(n), d);
    return out;
  }
  const auto& a = as_array(j, where);
  if (static_cast<int>(a.size()) != n)
    bad(where, std::to_string(a.size()) + " distributions for " + std::to_string(n) + " items");
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(distribution_from_json(a[i], at(where, i)));
  return out;
}

DecompositionTree tree_from_json(const json& j, const std::string& where) {
  DecompositionTree td;
  const auto& nodes = as_array(field(j, "nodes", where), sub(where, "nodes"));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string w = at(sub(where, "nodes"), i);
    TreeNode node;
    node.id = static_cast<int>(as_int(field(nodes[i], "id", w), sub(w, "id")));
    node.cls = as_string(field(nodes[i], "class", w), sub(w, "class"));
    node.bag = int_list(field(nodes[i], "bag", w), sub(w, "bag"));
    if (nodes[i].contains("gamma")) node.gamma = as_double(nodes[i]["gamma"], sub(w, "gamma"));
    if (nodes[i].contains("rep")) {
      const auto& rep = nodes[i]["rep"];
      const std::string rw = sub(w, "rep");
      if (rep.is_array()) {
        node.columns = columns_from_json(rep, rw);
      } else if (rep.is_object() && rep.contains("columns")) {
        node.columns = columns_from_json(rep["columns"], sub(rw, "columns"));
      } else if (rep.is_object() && rep.contains("graph")) {
        node.graph = graph_from_json(rep["graph"], sub(rw, "graph"));
      } else {
        bad(rw, "expected {\"columns\": [...]} or {\"graph\": {...}}");
      }
    }
    td.nodes.push_back(std::move(node));
  }
  if (j.contains("edges")) {
    const auto& edges = as_array(j["edges"], sub(where, "edges"));
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string w = at(sub(where, "edges"), i);
      TreeEdge e;
      e.u = static_cast<int>(as_int(field(edges[i], "u", w), sub(w, "u")));
      e.v = static_cast<int>(as_int(field(edges[i], "v", w), sub(w, "v")));
      if (edges[i].contains("sum")) e.sum = static_cast<int>(as_int(edges[i]["sum"], sub(w, "sum")));
      td.edges.push_back(e);
    }
  }
  return td;
}

namespace {

GuaranteedMechanism guarantee_named(const std::string& name, const DecompositionTree& td, const std::string& cls,
                                    const GuaranteeOptions& go, const std::string& where) {
  if (name == "graphic") return graphic_guarantee(go);
  if (name == "multigraph") return multigraph_guarantee(go);
  if (name == "cographic") return cographic_guarantee();
  if (name == "r10x" || name == "class-pick") return r10x_guarantee();
  if (name == "two-column-sparse") return k_sparse_guarantee(2, go);
  if (name == "gamma") {
    double gamma = 0.0;
    for (const auto& node : td.nodes)
      if (node.cls == cls) gamma = std::max(gamma, node.gamma);
    return gamma_guarantee(gamma);
  }
  bad(where, "unknown bag mechanism '" + name + "'");
}

const char* default_bag_mechanism(const std::string& cls) {
  if (cls == "graphic") return "multigraph";
  if (cls == "cographic") return "cographic";
  if (cls == "r10x") return "r10x";
  if (cls == "two-column-sparse") return "two-column-sparse";
  return "gamma";
}

json compose_json(const ComposeResult& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    json st{{"node", s.node}, {"bag", s.bag}, {"s", s.s}, {"lambda", s.lambda}, {"mechanism", s.mechanism},
            {"bag_ratio", s.bag_ratio}};
    if (s.contraction) {
      const auto& c = *s.contraction;
      st["contraction"] = {{"dim_l", c.dim_l},
                           {"dim_c", c.dim_c},
                           {"a_star", c.a_star},
                           {"c_star", c.c_star},
                           {"value_s", c.value_s.mean},
                           {"value_s_stderr", c.value_s.stderr_},
                           {"value_contracted", c.value_contracted.mean},
                           {"exact", c.value_s.exact && c.value_contracted.exact},
                           {"transfer_checked", c.transfer_checked}};
    }
    stages.push_back(st);
  }
  json th = json::array();
  for (const auto& e : r.thickness) th.push_back({{"u", e.edge.u}, {"v", e.edge.v}, {"lambda", e.lambda}});
  return {{"ratio", r.ratio}, {"stages", stages}, {"thickness", th}};
}

}  // namespace

BuiltMechanism build_mechanism(const json& spec, const MatroidInstance& m, const std::vector<Distribution>& dists,
                               const DecompositionTree* tree, std::uint64_t seed) {
  const std::string where = "mechanism";
  const std::string type = as_string(field(spec, "type", where), sub(where, "type"));
  GuaranteeOptions go;
  if (spec.contains("ex_ante_trials")) go.ex_ante_trials = as_u64(spec["ex_ante_trials"], sub(where, "ex_ante_trials"));
  const std::uint64_t build_seed = derive_seed(seed, "mechanism/build");
  auto relax = [&] { return ex_ante(m, dists, go.ex_ante_trials, build_seed); };
  auto need_graph = [&](MatroidKind kind) -> const Graph& {
    if (m.kind() != kind) bad(sub(where, "type"), "'" + type + "' needs a " + to_string(kind) + " matroid");
    return *m.graph();
  };

  BuiltMechanism out;
  out.mechanism = located(where, [&]() -> MechanismPtr {
    if (type == "single") return single_item_mechanism(dists);
    if (type == "graphic") {
      const Graph& g = need_graph(MatroidKind::graphic);
      auto mech = graphic_mechanism(g, relax());
      out.details["relaxation"] = relaxation_json(*mech->relaxation());
      out.details["loads"] = orientation_loads(g.vertices, mech->orientation(), mech->relaxation()->p);
      return mech;
    }
    if (type == "multigraph") {
      auto mech = multigraph_mechanism(need_graph(MatroidKind::graphic), relax());
      out.details["relaxation"] = relaxation_json(*mech->relaxation());
      return mech;
    }
    if (type == "k-sparse") {
      if (m.vectors() == nullptr) bad(sub(where, "type"), "'k-sparse' needs a vector matroid");
      const int k = spec.contains("k") ? static_cast<int>(as_int(spec["k"], sub(where, "k"))) : m.vectors()->max_support();
      auto mech = k_sparse_mechanism(m, k, relax());
      out.details["relaxation"] = relaxation_json(*mech->relaxation());
      out.details["k"] = k;
      return mech;
    }
    if (type == "cographic-3ec") return std::make_shared<Cographic3ECMechanism>(need_graph(MatroidKind::cographic));
    if (type == "cographic") return std::make_shared<CographicMechanism>(need_graph(MatroidKind::cographic), dists);
    if (type == "gamma") {
      return std::make_shared<GammaSparseMechanism>(m, as_double(field(spec, "gamma", where), sub(where, "gamma")));
    }
    if (type == "class-pick") return std::make_shared<ParallelClassMechanism>(m, dists);
    if (type == "fixed") {
      ThresholdVector tv;
      const auto& a = as_array(field(spec, "thresholds", where), sub(where, "thresholds"));
      if (static_cast<int>(a.size()) != m.size()) bad(sub(where, "thresholds"), "one threshold per item required");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string w = at(sub(where, "thresholds"), i);
        if (a[i].is_object()) {
          tv.values.push_back({as_double(field(a[i], "value", w), sub(w, "value")),
                               a[i].contains("tie") ? as_double(a[i]["tie"], sub(w, "tie")) : 1.0});
        } else {
          tv.values.push_back(Threshold::at_least(as_double(a[i], w)));
        }
      }
      const double ratio = spec.contains("ratio") ? as_double(spec["ratio"], sub(where, "ratio"))
                                                  : std::numeric_limits<double>::infinity();
      return std::make_shared<FixedMechanism>(std::move(tv), ratio);
    }
    if (type == "tree" || type == "regular") {
      if (tree == nullptr) bad(where, "'" + type + "' needs a tree");
      ComposeResult r;
      if (type == "regular") {
        r = regular_mechanism(m, *tree, dists, build_seed, go);
      } else {
        std::map<std::string, GuaranteedMechanism> bags;
        for (const auto& node : tree->nodes) {
          if (bags.count(node.cls)) continue;
          std::string name = default_bag_mechanism(node.cls);
          if (spec.contains("bags") && spec["bags"].contains(node.cls))
            name = as_string(spec["bags"][node.cls], sub(sub(where, "bags"), node.cls.c_str()));
          bags.emplace(node.cls, guarantee_named(name, *tree, node.cls, go, sub(where, "bags")));
        }
        ComposeOptions co;
        co.k = static_cast<int>(as_int(field(spec, "k", where), sub(where, "k")));
        co.seed = build_seed;
        r = tree_compose(m, *tree, bags, dists, co);
      }
      out.details["composition"] = compose_json(r);
      return r.mechanism;
    }
    bad(sub(where, "type"), "unknown mechanism '" + type +
                                "' (single, graphic, multigraph, k-sparse, cographic-3ec, cographic, gamma, "
                                "class-pick, fixed, tree, regular)");
  });
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) bad("config", "expected an object");
  ExperimentConfig c;
  if (j.contains("name")) c.name = as_string(j["name"], "name");
  c.matroid_json = field(j, "matroid", "config");
  c.matroid = matroid_from_json(c.matroid_json, "matroid");
  if (j.contains("distributions")) c.dists = distributions_from_json(j["distributions"], c.matroid->size());
  if (j.contains("mechanism")) {
    c.mechanism = j["mechanism"];
    if (!c.mechanism.is_object()) bad("mechanism", "expected an object");
  }
  if (j.contains("tree")) {
    c.tree = tree_from_json(j["tree"], "tree");
    if (j["tree"].contains("k")) c.tree_k = static_cast<int>(as_int(j["tree"]["k"], "tree.k"));
  }
  if (j.contains("order")) {
    const std::string text = as_string(j["order"], "order");
    c.order = located("order", [&] { return OrderStrategy::parse(text); });
  }
  if (j.contains("trials")) {
    c.trials = as_u64(j["trials"], "trials");
    if (c.trials == 0) bad("trials", "must be at least 1");
  }
  if (j.contains("seed")) c.seed = as_u64(j["seed"], "seed");
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("json")) c.output_json = as_string(o["json"], "output.json");
    if (o.contains("csv")) c.output_csv = as_string(o["csv"], "output.csv");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"instance",      "mechanism",      "order",
                                             "trials",        "seed",           "gambler_mean",
                                             "gambler_stderr", "prophet_mean",  "prophet_stderr",
                                             "ratio",         "claimed_alpha",  "verdict"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
  return out + "\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

}  // namespace

std::string csv_row(const SimulationReport& r) {
  std::ostringstream os;
  os << csv_field(r.instance) << ',' << csv_field(r.mechanism) << ',' << csv_field(r.order_strategy) << ','
     << r.trials << ',' << r.seed << ',' << format_number(r.gambler_mean) << ',' << format_number(r.gambler_stderr)
     << ',' << format_number(r.prophet_mean) << ',' << format_number(r.prophet_stderr) << ','
     << format_number(r.empirical_ratio()) << ',' << format_number(r.claimed_ratio) << ',' << r.verdict() << '\n';
  return os.str();
}

json report_to_json(const SimulationReport& r, const json& mechanism_details) {
  json policies = json::array();
  for (const auto& p : r.policies) policies.push_back({{"name", p.name}, {"mean", p.mean}, {"stderr", p.stderr_}});
  json j{{"instance", r.instance},
         {"mechanism", r.mechanism},
         {"order", r.order_strategy},
         {"trials", r.trials},
         {"seed", r.seed},
         {"exact", r.exact},
         {"claimed_alpha", number_or_null(r.claimed_ratio)},
         {"gambler_mean", r.gambler_mean},
         {"gambler_stderr", r.gambler_stderr},
         {"prophet_mean", r.prophet_mean},
         {"prophet_stderr", r.prophet_stderr},
         {"ratio", r.empirical_ratio()},
         {"slack", r.slack()},
         {"verdict", r.verdict()},
         {"worst_order", r.worst_order},
         {"dominance_violations", r.dominance_violations},
         {"relaxation_bound", number_or_null(r.relaxation_bound)},
         {"relaxation_p", r.relaxation_p},
         {"acceptance", r.acceptance},
         {"survival", r.survival},
         {"policies", policies}};
  if (!mechanism_details.empty()) j["details"] = mechanism_details;
  return j;
}

SimulationReport exact_report(const ExactResult& e, const std::string& instance, const Mechanism& mech,
                              const std::string& order, std::uint64_t seed) {
  SimulationReport r;
  r.instance = instance;
  r.mechanism = mech.name();
  r.order_strategy = order;
  r.trials = 0;
  r.seed = seed;
  r.claimed_ratio = mech.ratio();
  r.gambler_mean = e.gambler;
  r.prophet_mean = e.prophet;
  r.worst_order = e.worst_order;
  r.exact = true;
  r.relaxation_bound = std::numeric_limits<double>::quiet_NaN();
  if (const auto* relax = mech.relaxation()) {
    r.relaxation_bound = relax->bound();
    r.relaxation_p = relax->p;
  }
  return r;
}

json exact_to_json(const ExactResult& e, const SimulationReport& summary, const json& mechanism_details) {
  json j = report_to_json(summary, mechanism_details);
  j["gambler_fixed_order"] = e.gambler_fixed_order;
  j["states"] = e.states;
  j["draws"] = e.draws;
  j["orders"] = e.orders;
  j.erase("acceptance");
  j.erase("survival");
  j.erase("policies");
  j.erase("dominance_violations");
  j.erase("gambler_stderr");
  j.erase("prophet_stderr");
  return j;
}

}  // namespace mp::io
