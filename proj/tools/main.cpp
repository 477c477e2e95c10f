#include <vector>

#include "sscf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sscf::cli::run(args);
}
