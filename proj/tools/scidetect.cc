#include "scidetect/cli.h"

int main(int argc, char** argv) { return scidetect::run_cli(argc, argv); }
