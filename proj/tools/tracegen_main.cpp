#include <iostream>

#include "tracegen/common.hpp"

int main() {
  std::cout << "tracegen " << tracegen::kToolVersion << "\n";
  return 0;
}
