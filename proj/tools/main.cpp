#include "blockcg/cli.hpp"

int main(int argc, char** argv) { return blockcg::run_cli(argc, argv); }
