#include "cli_app.hpp"

int main(int argc, char** argv) { return frontal_cli::run(argc, argv); }
