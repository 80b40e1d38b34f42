#include "socopf/cli.hpp"

int main(int argc, char** argv) { return socopf::cli_main(argc, argv); }
