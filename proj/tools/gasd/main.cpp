#include "commands.hpp"

int main(int argc, char** argv) { return gasd::cli::run(argc, argv); }
