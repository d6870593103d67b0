#include <cstdlib>
#include <iostream>
#include <string>

#include "lostsales/app/acceptance.hpp"

int main(int argc, char** argv) {
  lostsales::app::AcceptanceOptions opts;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--seed") {
      opts.seed = std::stoull(argv[i + 1]);
    } else if (key == "--threads") {
      opts.threads = std::stoi(argv[i + 1]);
    } else if (key == "--only") {
      opts.only.push_back(std::stoi(argv[i + 1]));
    } else {
      std::cerr << "usage: acceptance [--seed N] [--threads N] [--only ID]...\n";
      return 2;
    }
  }
  const auto results = lostsales::app::run_acceptance(opts, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria pass") << std::endl;
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
