#include "ragq/cli.hpp"

int main(int argc, char** argv) { return ragq::cli_main(argc, argv); }
