#include "splitlangevin/experiments.hpp"

int main(int argc, char** argv) { return splitlangevin::run_cli(argc, argv); }
