#include "vgpnn/cli.hpp"

int main(int argc, char** argv) { return vgpnn::cli_main(argc, argv); }
