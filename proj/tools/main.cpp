#include "gvfa/cli.hpp"

int main(int argc, char** argv) { return gvfa::cli::run_main(argc, argv); }
