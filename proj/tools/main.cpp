#include "squidmw/cli.hpp"

int main(int argc, char** argv) { return squidmw::run_cli(argc, argv); }
