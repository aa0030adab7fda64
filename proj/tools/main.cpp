#include "cli.hpp"

int main(int argc, char** argv) { return aug3d::cli::run(argc, argv); }
