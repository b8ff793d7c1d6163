#include <iostream>
#include <string>
#include <vector>

#include "wtcli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wtcli::dispatch(args, std::cout, std::cerr);
}
