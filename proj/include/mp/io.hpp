#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mp/composition.hpp"
#include "mp/distribution.hpp"
#include "mp/harness.hpp"
#include "mp/matroid.hpp"
#include "mp/mechanism.hpp"

namespace mp::io {

using json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become InputError("<source>:<line>:<col>: ...").
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

/// `where` prefixes error messages, e.g. "matroid.edges[2]".
Graph graph_from_json(const json& j, const std::string& where);
MatroidInstance matroid_from_json(const json& j, const std::string& where = "matroid");
Distribution distribution_from_json(const json& j, const std::string& where);
/// An array of n laws, or {"all": law} repeated n times.
std::vector<Distribution> distributions_from_json(const json& j, int n, const std::string& where = "distributions");
DecompositionTree tree_from_json(const json& j, const std::string& where = "tree");

json matroid_to_json(const MatroidInstance& m);

struct BuiltMechanism {
  MechanismPtr mechanism;
  /// Construction details (relaxation, composition stages) for the report.
  json details = json::object();
};

/// Mechanism named by `spec.type`: single, graphic, multigraph, k-sparse (k),
/// cographic-3ec, cographic, gamma (gamma), class-pick, tree (k, bags), regular.
BuiltMechanism build_mechanism(const json& spec, const MatroidInstance& m, const std::vector<Distribution>& dists,
                               const DecompositionTree* tree, std::uint64_t seed);

struct ExperimentConfig {
  std::string name = "instance";
  json matroid_json;
  std::optional<MatroidInstance> matroid;
  std::vector<Distribution> dists;
  json mechanism = json::object();
  std::optional<DecompositionTree> tree;
  /// Declared thickness bound for the tree (tree.k), if any.
  std::optional<int> tree_k;
  OrderStrategy order = OrderStrategy::adversarial();
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string output_json;
  std::string output_csv;
};

ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

/// Fixed CSV columns, in order.
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const SimulationReport& r);
json report_to_json(const SimulationReport& r, const json& mechanism_details);

/// Exact evaluation summary in the same shape as a simulation report.
SimulationReport exact_report(const ExactResult& e, const std::string& instance, const Mechanism& mech,
                              const std::string& order, std::uint64_t seed);
json exact_to_json(const ExactResult& e, const SimulationReport& summary, const json& mechanism_details);

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace mp::io
