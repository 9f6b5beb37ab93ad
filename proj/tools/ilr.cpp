#include "cli.hpp"

int main(int argc, char** argv) { return ilr::cli::run(argc, argv); }
