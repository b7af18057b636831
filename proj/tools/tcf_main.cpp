#include <iostream>
#include <string>
#include <vector>

#include "tcf/service/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tcf::service::run_cli(args, std::cout, std::cerr);
}
