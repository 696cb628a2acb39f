#include <iostream>

#include "ddlqr/cli.hpp"

int main(int argc, char** argv) { return ddlqr::cli::run(argc, argv, std::cout, std::cerr); }
