#include "commands.hpp"

int main(int argc, char** argv) { return affdim::cli::run(argc, argv); }
