#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "isofree/commands.hpp"
#include "isofree/config.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::error_path;
using test_support::raises;

namespace {

const char* kMinimal = R"({"correlator": {"kind": "LongRange", "A": 1.0}, "state_space": {"type": "hypercube"}})";

}  // namespace

TEST_CASE("minimal config parses") {
  const RunConfig cfg = parse_config(std::string(kMinimal));
  CHECK(cfg.correlator.slope == 1.0);
  CHECK(cfg.beta == std::vector<double>{1.0});
  CHECK_FALSE(cfg.seed.has_value());
  CHECK_NOTHROW(require_seed(cfg, Command::Validate));
  CHECK_NOTHROW(require_seed(cfg, Command::Evaluate));
}

TEST_CASE("seed is mandatory for stochastic commands") {
  const RunConfig cfg = parse_config(std::string(kMinimal));
  for (Command c : {Command::Simulate, Command::Optimize, Command::Cascade, Command::Verify}) {
    CHECK(raises(ErrorCode::SchemaError, [&] { require_seed(cfg, c); }));
    CHECK(error_path([&] { require_seed(cfg, c); }) == "seed");
  }
  CHECK(raises(ErrorCode::SchemaError, [&] { run(Command::Simulate, cfg); }));
}

TEST_CASE("schema errors carry the key path") {
  CHECK(error_path([] { parse_config(std::string(R"({"correlator": {"bogus": 1}})")); }) == "correlator.bogus");
  CHECK(raises(ErrorCode::SchemaError, [] { parse_config(std::string(R"({"unknown": 1})")); }));
  CHECK(raises(ErrorCode::SchemaError, [] { parse_config(std::string(R"({"beta": "hot"})")); }));
  CHECK(raises(ErrorCode::SchemaError, [] { parse_config(std::string(R"({"seed": -3})")); }));
  CHECK(raises(ErrorCode::SchemaError, [] { parse_config(std::string("{not json")); }));
  CHECK(raises(ErrorCode::SchemaError, [] { parse_command("frobnicate"); }));
}

TEST_CASE("module validation errors are prefixed with the config path") {
  const std::string text = R"({"correlator": {"kind": "LongRange", "atoms": [{"w": -1, "t": 1}]}})";
  CHECK(raises(ErrorCode::NonpositiveWeight, [&] { parse_config(text); }));
  CHECK(error_path([&] { parse_config(text); }) == "correlator.atoms[0].w");
}

TEST_CASE("serialization is idempotent") {
  const std::string text = R"({"correlator": {"kind": "LongRange", "A": 0.5, "atoms": [{"w": 1, "t": 2}]},
    "state_space": {"type": "product", "atoms": [{"u": -1, "p": 1}, {"u": 0.5, "p": 2}]},
    "beta": [0.5, 1.0], "rsb_levels": 2, "seed": 99, "simulate": {"N": 6, "reps": 10}})";
  const auto once = serialize(parse_config(text));
  const auto twice = serialize(parse_config(once));
  CHECK(once == twice);
  CHECK(once.dump() == twice.dump());
  CHECK(once["seed"] == 99);
}

TEST_CASE("validate and evaluate reports") {
  RunConfig cfg = parse_config(std::string(kMinimal));
  CHECK(run(Command::Validate, cfg).exit_code == 0);
  cfg.order_parameter = OrderParameterSpec{1.0, {0.5}, {0.5}, std::nullopt};
  cfg.beta = {0.0};
  const Report rep = run(Command::Evaluate, cfg);
  CHECK(rep.body["results"][0]["value"].get<double>() == doctest::Approx(0.0));
  CHECK(rep.body["results"][0]["free_energy"].is_null());
  cfg.output.format = "csv";
  CHECK(render(rep, "csv").find("beta") == 0);
}

TEST_CASE("identical seeds give identical simulate output") {
  RunConfig cfg = parse_config(std::string(kMinimal));
  cfg.seed = 5;
  cfg.simulate.N = 6;
  cfg.simulate.reps = 5;
  CHECK(render(run(Command::Simulate, cfg), "json") == render(run(Command::Simulate, cfg), "json"));
  CHECK(render(run(Command::Simulate, cfg), "csv").find("replica") != std::string::npos);
}
