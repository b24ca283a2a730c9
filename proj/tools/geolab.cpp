#include "geolab/runner.hpp"

int main(int argc, char** argv) { return geolab::cli_main(argc, argv); }
