#include "rgbxy/cli.hpp"

int main(int argc, char** argv) { return rgbxy::cli_main(argc, argv); }
