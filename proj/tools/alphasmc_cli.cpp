#include "alphasmc/bench.hpp"

int main(int argc, char** argv) { return alphasmc::cli_main(argc, argv); }
