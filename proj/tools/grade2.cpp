#include "grade2/io/commands.hpp"

int main(int argc, char** argv) { return grade2::io::run_cli(argc, argv); }
