// Runs every acceptance criterion and prints one line per criterion. Exits
// nonzero when any criterion does not pass.

#include <iostream>

#include "coupled_levy/acceptance.hpp"

int main() {
  const auto results = coupled_levy::run_acceptance({}, &std::cout);
  return coupled_levy::all_passed(results) ? 0 : 1;
}
