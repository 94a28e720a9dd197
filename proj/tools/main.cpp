#include <iostream>
#include <string>
#include <vector>

#include "aaseq/cli.hpp"

int main(int argc, char** argv) {
  return aaseq::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
