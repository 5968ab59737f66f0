#include "cli.hpp"

int main(int argc, char** argv) { return flapkin::cli_main(argc, argv); }
