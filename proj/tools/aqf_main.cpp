#include "aqf/cli.hpp"

int main(int argc, char** argv) { return aqf::cli::run(argc, argv); }
