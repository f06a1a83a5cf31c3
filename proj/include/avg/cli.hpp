#pragma once

// ---------------------------------------------------------------------------
// Command-line front end, callable in-process for testing.
//
// Subcommands: kloosterman, char, innerprod, theorem, scan, fdelta, selftest.
// Exit codes: 0 all verdicts pass / informational success; 1 usage, config, or
// hypothesis violation (message names the violated hypothesis); 2 computation
// error; 3 at least one fail verdict; 4 inconclusive verdicts only.
//
// Output is deterministic: identical configurations emit byte-identical
// JSON/CSV (timing data is only included when --timings is passed).  The
// worker-count flag --workers can be overridden by the AVG_WORKERS
// environment variable.
// ---------------------------------------------------------------------------

#include <ostream>
#include <string>
#include <vector>

namespace avg::cli {

// args excludes the program name: e.g. {"theorem", "--level", "400"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace avg::cli
