#include "cli.hpp"

int main(int argc, char** argv) { return latdisp::cli::run(argc, argv); }
