#include "ng/cli.hpp"

int main(int argc, char** argv) { return ng::run_cli(argc, argv); }
