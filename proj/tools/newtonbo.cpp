// Command-line benchmark runner.
#include "newtonbo/experiment.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace newtonbo;
  ExperimentSpec spec;
  try {
    spec = parse_args(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n(run with --help for the list of flags)\n";
    return 64;
  }
  try {
    return execute(spec, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
