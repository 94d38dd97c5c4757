#include "switchosc/cli.hpp"

int main(int argc, char** argv) { return switchosc::run_cli(argc, argv); }
