#include "minimax/cli.hpp"

int main(int argc, char** argv) { return minimax::cli_main(argc, argv); }
