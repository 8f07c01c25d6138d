#include "cli.hpp"

int main(int argc, char** argv) { return oitk::cli::run(argc, argv); }
