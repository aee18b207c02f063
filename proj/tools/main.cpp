#include "cli.hpp"

int main(int argc, char** argv) { return convtact::cli_dispatch(argc, argv); }
