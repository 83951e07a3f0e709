#include "nnosc/cli.hpp"

int main(int argc, char** argv) { return nnosc::cli_main(argc, argv); }
