#include "nashseek/cli.hpp"

int main(int argc, char** argv) { return nashseek::cli_main(argc, argv); }
