#include <bordercurve/cli.hpp>

int main(int argc, char** argv) { return bordercurve::cli::run(argc, argv); }
