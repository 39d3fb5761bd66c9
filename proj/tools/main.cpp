#include "commands.hpp"

int main(int argc, char** argv) { return varhsmm::cli::run_cli(argc, argv); }
