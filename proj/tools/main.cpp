#include <iostream>

#include "faqir_cli.hpp"

int main(int argc, char** argv) { return faqir::cli::run(argc, argv, std::cout, std::cerr); }
