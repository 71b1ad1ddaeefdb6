#include "missdiff/cli.hpp"

int main(int argc, char** argv) { return missdiff::run_cli(argc, argv); }
