#include "stochlp/harness.hpp"

int main(int argc, char** argv) { return stochlp::harness::cli_main(argc, argv); }
