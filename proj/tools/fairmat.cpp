#include "fairmat/cli.hpp"

int main(int argc, char** argv) { return fairmat::cli::run(argc, argv); }
