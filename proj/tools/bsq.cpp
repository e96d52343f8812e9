#include "bsq/commands.hpp"

int main(int argc, char** argv) { return bsq::run_cli(argc, argv); }
