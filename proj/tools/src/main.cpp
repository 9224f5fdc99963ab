#include <iostream>

#include "carma_cli/app.hpp"

int main(int argc, char** argv) { return carma::cli::run_cli(argc, argv, std::cout, std::cerr); }
