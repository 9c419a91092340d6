#include "sirsn/cli.hpp"

int main(int argc, char** argv) { return sirsn::cli::run(argc, argv); }
