#include <string>
#include <vector>

#include "pra/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pra::cli(args);
}
