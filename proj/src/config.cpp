#include "isofree/config.hpp"

#include <set>
#include <utility>

#include "isofree/error.hpp"

namespace isofree {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::SchemaError, message, path);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) schema(path, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
  schema(path, "expected a nonnegative integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_reals(const json& v, const std::string& path) {
  if (!v.is_array()) schema(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], index_path(path, i)));
  return out;
}

// Reads keys from one JSON object and rejects any key it was not asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) schema(path_.empty() ? "$" : path_, "expected an object");
  }

  const json* find(const std::string& key) {
    allowed_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  void real(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_real(*v, path(key));
  }
  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) out = as_count(*v, path(key));
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) out = static_cast<int>(as_count(*v, path(key)));
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) out = as_string(*v, path(key));
  }
  void reals(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) out = as_reals(*v, path(key));
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!allowed_.count(it.key())) schema(path(it.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> allowed_;
};

template <typename F>
auto with_path(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    throw Error(e.code(), e.what(), e.path().empty() ? prefix : join(prefix, e.path()));
  }
}

CorrelatorSpec parse_correlator(const json& node) {
  Section s(node, "correlator");
  CorrelatorSpec spec;
  std::string kind = "LongRange";
  s.text("kind", kind);
  if (kind == "LongRange") {
    spec.kind = CorrelatorKind::LongRange;
  } else if (kind == "Isotropic") {
    spec.kind = CorrelatorKind::Isotropic;
  } else {
    schema(s.path("kind"), "kind must be LongRange or Isotropic");
  }
  s.real("A", spec.slope);
  s.real("c0", spec.constant);
  if (const json* atoms = s.find("atoms")) {
    if (!atoms->is_array()) schema(s.path("atoms"), "expected an array");
    for (std::size_t i = 0; i < atoms->size(); ++i) {
      Section a((*atoms)[i], index_path(s.path("atoms"), i));
      MixtureAtom atom{0.0, 0.0};
      if (!a.find("w") || !a.find("t")) schema(index_path(s.path("atoms"), i), "atom needs w and t");
      a.real("w", atom.weight);
      a.real("t", atom.rate);
      a.finish();
      spec.atoms.push_back(atom);
    }
  }
  s.finish();
  if (spec.kind == CorrelatorKind::LongRange && node.contains("c0")) {
    schema(s.path("c0"), "c0 applies to Isotropic correlators only");
  }
  if (spec.kind == CorrelatorKind::Isotropic && node.contains("A")) {
    schema(s.path("A"), "A applies to LongRange correlators only");
  }
  return spec;
}

StateSpaceSpec parse_state_space(const json& node) {
  Section s(node, "state_space");
  StateSpaceSpec spec;
  s.text("type", spec.type);
  if (spec.type == "product") {
    const json* atoms = s.find("atoms");
    if (!atoms || !atoms->is_array()) schema(s.path("atoms"), "product space needs an atoms array");
    for (std::size_t i = 0; i < atoms->size(); ++i) {
      Section a((*atoms)[i], index_path(s.path("atoms"), i));
      SpinAtom atom{0.0, 0.0};
      if (!a.find("u") || !a.find("p")) schema(index_path(s.path("atoms"), i), "atom needs u and p");
      a.real("u", atom.value);
      a.real("p", atom.mass);
      a.finish();
      spec.atoms.push_back(atom);
    }
  } else if (spec.type == "ball") {
    s.real("L", spec.L);
    s.real("h1", spec.h1);
    s.real("h2", spec.h2);
  } else if (spec.type != "hypercube") {
    schema(s.path("type"), "type must be hypercube, product or ball");
  }
  s.finish();
  return spec;
}

EvalConfig parse_eval(const json& node) {
  Section s(node, "eval");
  EvalConfig cfg;
  s.reals("M_grid", cfg.M_grid);
  s.real("y_halfwidth", cfg.y_halfwidth);
  s.integer("y_points", cfg.y_points);
  s.integer("quad_nodes", cfg.quad_nodes);
  if (const json* b = s.find("lambda_bracket")) {
    const std::vector<double> v = as_reals(*b, s.path("lambda_bracket"));
    if (v.size() != 2) schema(s.path("lambda_bracket"), "expected [lo, hi]");
    cfg.lambda_lo = v[0];
    cfg.lambda_hi = v[1];
  }
  s.real("tol_lambda", cfg.tol_lambda);
  s.real("tol_value", cfg.tol_value);
  s.real("fd_dy", cfg.fd_dy);
  s.real("fd_cfl", cfg.fd_cfl);
  s.integer("fd_q_steps", cfg.fd_q_steps);
  s.finish();
  return cfg;
}

OptimizerOptions parse_optimizer(const json& node) {
  Section s(node, "optimizer");
  OptimizerOptions opts;
  s.integer("starts", opts.starts);
  s.integer("max_evals", opts.max_evaluations);
  s.real("tol", opts.tol);
  s.real("r_tol", opts.r_tol);
  s.finish();
  if (opts.starts < 5) schema(s.path("starts"), "at least 5 starts are required");
  if (opts.max_evaluations < 10) schema(s.path("max_evals"), "max_evals must be >= 10");
  if (!(opts.tol >= 0.0)) schema(s.path("tol"), "tol must be >= 0");
  if (!(opts.r_tol > 0.0)) schema(s.path("r_tol"), "r_tol must be positive");
  return opts;
}

SimulateConfig parse_simulate(const json& node) {
  Section s(node, "simulate");
  SimulateConfig cfg;
  s.count("N", cfg.N);
  s.count("reps", cfg.reps);
  s.reals("t_grid", cfg.t_grid);
  s.finish();
  if (cfg.N == 0) schema(s.path("N"), "N must be positive");
  if (cfg.reps < 2) schema(s.path("reps"), "reps must be >= 2");
  return cfg;
}

OrderParameterSpec parse_order_parameter(const json& node) {
  Section s(node, "order_parameter");
  OrderParameterSpec spec;
  if (!s.find("r")) schema(s.path("r"), "order_parameter needs r");
  s.real("r", spec.r);
  s.reals("q", spec.q);
  s.reals("x", spec.x);
  if (const json* l = s.find("lambda")) spec.lambda = as_real(*l, s.path("lambda"));
  s.finish();
  with_path("order_parameter", [&] { return DiscreteOrderParameter::validate(spec.r, spec.q, spec.x); });
  return spec;
}

CascadeConfig parse_cascade(const json& node) {
  Section s(node, "cascade");
  CascadeConfig cfg;
  s.text("check", cfg.check);
  s.reals("x", cfg.x);
  s.reals("sigma", cfg.sigma);
  s.count("K", cfg.K);
  s.count("reps", cfg.reps);
  s.count("samples", cfg.samples);
  s.real("M", cfg.M);
  s.count("N", cfg.N);
  s.finish();
  if (cfg.check != "identity" && cfg.check != "nested" && cfg.check != "covariance" && cfg.check != "tail") {
    schema(s.path("check"), "check must be identity, nested, covariance or tail");
  }
  if (cfg.x.empty()) schema(s.path("x"), "x must not be empty");
  return cfg;
}

OutputConfig parse_output(const json& node) {
  Section s(node, "output");
  OutputConfig cfg;
  s.text("path", cfg.path);
  s.text("format", cfg.format);
  s.finish();
  if (cfg.format != "json" && cfg.format != "csv") schema(s.path("format"), "format must be json or csv");
  return cfg;
}

}  // namespace

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"validate", Command::Validate}, {"evaluate", Command::Evaluate}, {"optimize", Command::Optimize},
      {"simulate", Command::Simulate}, {"cascade", Command::Cascade},   {"verify", Command::Verify}};
  for (const auto& [key, value] : table) {
    if (name == key) return value;
  }
  schema("command", "unknown command '" + name + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::Validate: return "validate";
    case Command::Evaluate: return "evaluate";
    case Command::Optimize: return "optimize";
    case Command::Simulate: return "simulate";
    case Command::Cascade: return "cascade";
    case Command::Verify: return "verify";
  }
  return "unknown";
}

bool is_stochastic(Command command) {
  return command == Command::Optimize || command == Command::Simulate || command == Command::Cascade ||
         command == Command::Verify;
}

StateSpace StateSpaceSpec::build() const {
  if (type == "hypercube") return StateSpace::hypercube();
  if (type == "product") return StateSpace::product(atoms);
  return StateSpace::ball(L, h1, h2);
}

RunConfig parse_config(const std::string& text) {
  json tree;
  try {
    tree = json::parse(text);
  } catch (const json::parse_error& e) {
    schema("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(tree);
}

RunConfig parse_config(const json& tree) {
  Section root(tree, "");
  RunConfig cfg;
  const json* correlator = root.find("correlator");
  if (!correlator) schema("correlator", "missing correlator");
  cfg.correlator = parse_correlator(*correlator);
  const Correlator c = with_path("correlator", [&] { return Correlator(cfg.correlator); });
  if (const json* v = root.find("state_space")) cfg.state_space = parse_state_space(*v);
  with_path("state_space", [&] { return cfg.state_space.build(); });
  if (const json* v = root.find("beta")) {
    cfg.beta = v->is_array() ? as_reals(*v, "beta") : std::vector<double>{as_real(*v, "beta")};
    for (std::size_t i = 0; i < cfg.beta.size(); ++i) {
      if (!(cfg.beta[i] >= 0.0)) schema(index_path("beta", i), "beta must be >= 0");
    }
    if (cfg.beta.empty()) schema("beta", "beta must not be empty");
  }
  root.count("rsb_levels", cfg.rsb_levels);
  if (cfg.rsb_levels > 4) schema("rsb_levels", "at most 4 levels are supported");
  root.text("functional", cfg.functional);
  if (cfg.functional != "parisi" && cfg.functional != "cs") schema("functional", "functional must be parisi or cs");
  if (const json* v = root.find("eval")) cfg.eval = parse_eval(*v);
  with_path("eval", [&] {
    validate_eval_config(cfg.eval, c);
    return 0;
  });
  if (const json* v = root.find("optimizer")) cfg.optimizer = parse_optimizer(*v);
  if (const json* v = root.find("simulate")) cfg.simulate = parse_simulate(*v);
  if (const json* v = root.find("order_parameter")) cfg.order_parameter = parse_order_parameter(*v);
  if (const json* v = root.find("cascade")) cfg.cascade = parse_cascade(*v);
  if (const json* v = root.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      schema("seed", "seed must be an unsigned 64-bit integer");
    }
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const json* v = root.find("output")) cfg.output = parse_output(*v);
  root.finish();
  if (cfg.seed) cfg.optimizer.seed = *cfg.seed;
  return cfg;
}

void require_seed(const RunConfig& cfg, Command command) {
  if (is_stochastic(command) && !cfg.seed) {
    schema("seed", "command '" + to_string(command) + "' requires a seed");
  }
}

json serialize(const RunConfig& cfg) {
  json out;
  json corr;
  corr["kind"] = cfg.correlator.kind == CorrelatorKind::LongRange ? "LongRange" : "Isotropic";
  if (cfg.correlator.kind == CorrelatorKind::LongRange) {
    corr["A"] = cfg.correlator.slope;
  } else {
    corr["c0"] = cfg.correlator.constant;
  }
  corr["atoms"] = json::array();
  for (const auto& a : cfg.correlator.atoms) corr["atoms"].push_back({{"w", a.weight}, {"t", a.rate}});
  out["correlator"] = corr;

  json space;
  space["type"] = cfg.state_space.type;
  if (cfg.state_space.type == "product") {
    space["atoms"] = json::array();
    for (const auto& a : cfg.state_space.atoms) space["atoms"].push_back({{"u", a.value}, {"p", a.mass}});
  } else if (cfg.state_space.type == "ball") {
    space["L"] = cfg.state_space.L;
    space["h1"] = cfg.state_space.h1;
    space["h2"] = cfg.state_space.h2;
  }
  out["state_space"] = space;
  out["beta"] = cfg.beta;
  out["rsb_levels"] = cfg.rsb_levels;
  out["functional"] = cfg.functional;
  out["eval"] = {{"M_grid", cfg.eval.M_grid},
                 {"y_halfwidth", cfg.eval.y_halfwidth},
                 {"y_points", cfg.eval.y_points},
                 {"quad_nodes", cfg.eval.quad_nodes},
                 {"lambda_bracket", {cfg.eval.lambda_lo, cfg.eval.lambda_hi}},
                 {"tol_lambda", cfg.eval.tol_lambda},
                 {"tol_value", cfg.eval.tol_value},
                 {"fd_dy", cfg.eval.fd_dy},
                 {"fd_cfl", cfg.eval.fd_cfl},
                 {"fd_q_steps", cfg.eval.fd_q_steps}};
  out["optimizer"] = {{"starts", cfg.optimizer.starts},
                      {"max_evals", cfg.optimizer.max_evaluations},
                      {"tol", cfg.optimizer.tol},
                      {"r_tol", cfg.optimizer.r_tol}};
  out["simulate"] = {{"N", cfg.simulate.N}, {"reps", cfg.simulate.reps}, {"t_grid", cfg.simulate.t_grid}};
  if (cfg.order_parameter) {
    json op = {{"r", cfg.order_parameter->r}, {"q", cfg.order_parameter->q}, {"x", cfg.order_parameter->x}};
    if (cfg.order_parameter->lambda) op["lambda"] = *cfg.order_parameter->lambda;
    out["order_parameter"] = op;
  }
  out["cascade"] = {{"check", cfg.cascade.check}, {"x", cfg.cascade.x},         {"sigma", cfg.cascade.sigma},
                    {"K", cfg.cascade.K},         {"reps", cfg.cascade.reps},   {"samples", cfg.cascade.samples},
                    {"M", cfg.cascade.M},         {"N", cfg.cascade.N}};
  if (cfg.seed) out["seed"] = *cfg.seed;
  out["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return out;
}

}  // namespace isofree
