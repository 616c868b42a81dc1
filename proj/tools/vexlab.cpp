#include <string>
#include <vector>

#include "vexlab/harness.hpp"

int main(int argc, char** argv) {
  return vexlab::run_cli(std::vector<std::string>(argv, argv + argc));
}
