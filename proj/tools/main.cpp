#include "commentox/cli.hpp"

int main(int argc, char** argv) { return ctox::run(argc, argv); }
