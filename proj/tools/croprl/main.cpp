#include "commands.hpp"

int main(int argc, char** argv) { return croprl::cli::run(argc, argv); }
