#include "commands.hpp"

int main(int argc, char** argv) { return ovtom::cli::run(argc, argv); }
