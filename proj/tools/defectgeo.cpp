#include "defectgeo/cli.hpp"

int main(int argc, char** argv) { return defectgeo::cli::run(argc, argv); }
