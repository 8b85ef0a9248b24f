#pragma once

namespace ctox {

// Runs one CLI invocation. Returns the process exit code: 0 success,
// 1 validation/data error, 2 usage error. Logs go to stderr; data goes to
// files under --out only.
int run(int argc, const char* const* argv);

}  // namespace ctox
