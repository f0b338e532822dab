#include "cli.hpp"

int main(int argc, char** argv) { return polarfft::cli::main(argc, argv); }
