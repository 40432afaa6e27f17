// One line per acceptance criterion; exit status is the number of failures (capped).

#include <cstdio>

#include <unibike.hpp>

int main() {
  unibike::VerifyOptions opt;
  opt.cli_path = UNIBIKE_CLI_PATH;
  int failed = 0;
  opt.on_result = [&](const unibike::CriterionResult& r) {
    if (!r.pass) ++failed;
    std::printf("criterion %2d: %s | %s | %s (%.2f s)\n", r.id, r.pass ? "PASS" : "FAIL", r.title.c_str(),
                r.detail.c_str(), r.seconds);
    std::fflush(stdout);
  };
  const auto results = unibike::run_acceptance(opt);
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
