#pragma once

namespace ng {

// Command-line entry point. Exit codes: 0 success / positive verdict,
// 1 usage or input error, 2 negative mathematical verdict, 3 numerical failure.
int run_cli(int argc, const char* const argv[]);

}  // namespace ng
