#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "isofree/acceptance.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20260101;
  bool all = true;
  isofree::run_acceptance(seed, [&](const isofree::CriterionResult& r) {
    all = all && r.pass;
    std::printf("%s criterion %d: %s (%.1f s) %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.dump().c_str());
    std::fflush(stdout);
  });
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
