#include "vibdiag/cli.hpp"

int main(int argc, char** argv) { return vibdiag::run_cli(argc, argv); }
