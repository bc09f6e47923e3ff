#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "isofree/commands.hpp"
#include "isofree/config.hpp"
#include "isofree/error.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw isofree::Error(isofree::ErrorCode::SchemaError, "cannot read config file " + path, "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw isofree::Error(isofree::ErrorCode::InvalidArgument, "cannot write " + path, "out");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isofree: variational free energy of isotropic Gaussian random fields"};
  std::string command_name;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string functional;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command_name, "validate | evaluate | optimize | simulate | cascade | verify")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--functional", functional, "parisi | cs")->check(CLI::IsMember({"parisi", "cs"}));
  CLI11_PARSE(app, argc, argv);

  std::string out_target = out_path;
  try {
    const isofree::Command command = isofree::parse_command(command_name);
    isofree::RunConfig cfg = config_path.empty() ? isofree::parse_config(std::string("{}"))
                                                 : isofree::parse_config(read_file(config_path));
    if (seed) {
      cfg.seed = seed;
      cfg.optimizer.seed = *seed;
    }
    if (!functional.empty()) cfg.functional = functional;
    if (!format.empty()) cfg.output.format = format;
    if (out_target.empty()) out_target = cfg.output.path;
    const isofree::Report report = isofree::run(command, cfg);
    emit(isofree::render(report, cfg.output.format), out_target);
    return report.exit_code;
  } catch (const std::exception& e) {
    const std::string text = isofree::error_json(e).dump(2) + "\n";
    try {
      emit(text, out_target);
    } catch (const std::exception&) {
      std::cout << text;
    }
    if (!out_target.empty()) std::cerr << text;
    return 2;
  }
}
