#include "nonstat/cli.hpp"

int main(int argc, char** argv) { return nonstat::run_cli(argc, argv); }
