#include "ratstat_cli.hpp"

int main(int argc, char** argv) { return ratstat::cli::run(argc, argv); }
