#include "cli_app.hpp"

int main(int argc, char** argv) { return cmseq::cli::run(argc, argv); }
