#include "delayoc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return delayoc::runCli(argc, argv, std::cout, std::cerr); }
