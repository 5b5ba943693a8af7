#include "povm/cli.hpp"

int main(int argc, char **argv) { return povm::cli::run(argc, argv); }
