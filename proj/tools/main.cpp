#include "commands.hpp"

int main(int argc, char** argv) { return topicsent::cli::run(argc, argv); }
