#include "sparsets/cli.hpp"

int main(int argc, char** argv) { return sparsets::parse_and_dispatch(argc, argv); }
