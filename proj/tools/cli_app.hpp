#pragma once

// Entry point of the command line front end, split out of main() so the
// test suite can drive it in process.
namespace frontal_cli {

int run(int argc, const char* const* argv);

}  // namespace frontal_cli
