#include "emtm/cli.hpp"

int main(int argc, char** argv) { return emtm::run_cli(argc, argv); }
