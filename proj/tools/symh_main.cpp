#include <symh/cli.hpp>

int main(int argc, char** argv) { return symh::cli::main_entry(argc, argv); }
