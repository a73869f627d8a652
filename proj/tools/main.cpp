#include "cli.hpp"

int main(int argc, char** argv) { return prism::cli::cli_dispatch(argc, argv); }
