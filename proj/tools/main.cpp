#include "hslice/cli.hpp"

int main(int argc, char** argv) { return hslice::run_cli(argc, argv); }
