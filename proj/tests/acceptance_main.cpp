#include <iostream>

#include "xmdl/reproduce.hpp"

int main() { return xmdl::run_reproduce(std::cout); }
