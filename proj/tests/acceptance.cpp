#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include "walsh/verify.hpp"

// Usage: acceptance [--expect-fail name,name,...]
// Criteria listed after --expect-fail are still run and reported as FAIL. The
// exit status is 0 when the failing set equals the listed set, so a criterion
// that starts passing, or a new failure, breaks the run.
int main(int argc, char** argv) {
  std::set<std::string> expected;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--expect-fail") {
      std::stringstream ss(argv[i + 1]);
      for (std::string name; std::getline(ss, name, ',');)
        if (!name.empty()) expected.insert(name);
    }

  const auto results = walsh::run_acceptance({});
  int failed = 0;
  std::set<std::string> failing;
  for (const auto& r : results) {
    std::printf("criterion %d [%s]: %s (%.2f s) %s\n", r.criterion, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    if (!r.pass) {
      ++failed;
      failing.insert(r.name);
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  if (expected.empty()) return failed == 0 ? 0 : 1;
  std::string list;
  for (const auto& n : expected) list += (list.empty() ? "" : ",") + n;
  if (failing == expected) {
    std::printf("failures match the documented known failures: %s\n", list.c_str());
    return 0;
  }
  std::printf("failures differ from the documented known failures: %s\n", list.c_str());
  return 1;
}
