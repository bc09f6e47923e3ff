#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/parisi.hpp"
#include "isofree/saddle.hpp"

namespace isofree {

enum class Command { Validate, Evaluate, Optimize, Simulate, Cascade, Verify };

Command parse_command(const std::string& name);  // SchemaError on unknown names
std::string to_string(Command command);
bool is_stochastic(Command command);

struct StateSpaceSpec {
  std::string type = "hypercube";  // hypercube | product | ball
  std::vector<SpinAtom> atoms;
  double L = 1.0;
  double h1 = 0.0;
  double h2 = 0.0;

  StateSpace build() const;
};

struct SimulateConfig {
  std::size_t N = 12;
  std::size_t reps = 200;
  std::vector<double> t_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

struct OrderParameterSpec {
  double r = 1.0;
  std::vector<double> q;
  std::vector<double> x;
  std::optional<double> lambda;  // fixed multiplier instead of the infimum
};

struct CascadeConfig {
  std::string check = "identity";  // identity | nested | covariance | tail
  std::vector<double> x{0.5};
  std::vector<double> sigma{1.0};
  std::size_t K = 10000;
  std::size_t reps = 10000;
  std::size_t samples = 200000;
  double M = 4.0;
  std::size_t N = 4;
};

struct OutputConfig {
  std::string path;
  std::string format = "json";  // json | csv
};

struct RunConfig {
  CorrelatorSpec correlator;
  StateSpaceSpec state_space;
  std::vector<double> beta{1.0};
  std::size_t rsb_levels = 1;
  std::string functional = "parisi";  // parisi | cs
  EvalConfig eval;
  OptimizerOptions optimizer;
  SimulateConfig simulate;
  std::optional<OrderParameterSpec> order_parameter;
  CascadeConfig cascade;
  std::optional<std::uint64_t> seed;
  OutputConfig output;
};

// Parses and validates a JSON config; unknown keys and ill-typed values raise
// SchemaError carrying the key path, module validation errors are rethrown
// with the path prefixed by the config section.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& tree);

// SchemaError at "seed" when a stochastic command has no seed.
void require_seed(const RunConfig& cfg, Command command);

// Canonical JSON with every field present.
nlohmann::json serialize(const RunConfig& cfg);

}  // namespace isofree
