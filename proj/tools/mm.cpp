#include "mm_cli.hpp"

int main(int argc, char** argv) { return magnomech::cli::run(argc, argv); }
