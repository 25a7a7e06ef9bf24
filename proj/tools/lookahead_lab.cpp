#include "lookahead/experiment.hpp"

int main(int argc, char** argv) { return lookahead::run_cli(argc, argv); }
