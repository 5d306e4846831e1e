#include "stabias/cli.hpp"

int main(int argc, char** argv) { return stabias::run_cli(argc, argv); }
