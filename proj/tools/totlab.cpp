#include "totlab/cli.hpp"

int main(int argc, char** argv) { return totlab::cli::run(argc, argv); }
