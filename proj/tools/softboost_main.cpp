#include "softboost/cli.hpp"

int main(int argc, char** argv) { return softboost::run_cli(argc, argv); }
