#include "mocco/harness/cli.hpp"

int main(int argc, char** argv) { return mocco::harness::cli_main(argc, argv); }
