#pragma once

#include <string>

#include "json.hpp"

#include "isofree/config.hpp"

namespace isofree {

struct Report {
  nlohmann::json body;
  std::string csv;
  int exit_code = 0;
};

// Dispatches a command. Module errors propagate as isofree::Error.
Report run(Command command, const RunConfig& cfg);

// {"error": {"code", "message", "path"}}.
nlohmann::json error_json(const std::exception& e);

// Serialized report in the configured format, newline terminated.
std::string render(const Report& report, const std::string& format);

}  // namespace isofree
