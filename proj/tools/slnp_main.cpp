#include "slnp/cli.hpp"

int main(int argc, char** argv) { return slnp::run_cli(argc, argv); }
