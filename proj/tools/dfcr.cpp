#include <exception>
#include <iostream>

#include "dfcr/cli/config.hpp"
#include "dfcr/cli/output.hpp"

int main(int argc, char** argv) {
  using namespace dfcr::cli;
  RunConfig config;
  try {
    config = parse_config(argc, argv);
  } catch (const HelpRequest& help) {
    std::cout << help.text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "dfcr: " << e.what() << "\n";
    return 2;
  }
  try {
    run(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "dfcr: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
