#include "tollcast/cli.hpp"

int main(int argc, char** argv) { return tollcast::cli::run(argc, argv); }
