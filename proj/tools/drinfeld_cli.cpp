#include "drinfeld/cli.hpp"

int main(int argc, char** argv) { return drinfeld::cli::run(argc, argv); }
