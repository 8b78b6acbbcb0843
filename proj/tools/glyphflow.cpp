#include "glyphflow/app/cli.hpp"

int main(int argc, char** argv) { return glyphflow::app::cli_main(argc, argv); }
