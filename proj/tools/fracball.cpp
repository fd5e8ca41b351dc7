#include "fracball/cli.hpp"

int main(int argc, char** argv) { return fracball::cli::run(argc, argv); }
