#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rmtrans {

// A full CLI invocation: configuration source, overrides, and output sinks.
struct RunSpec {
    std::string config_path;   // empty: defaults only
    std::string preset;        // empty: as configured
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string output_dir = ".";
    bool write_csv = true;
    bool write_json = true;
    bool check_only = false;
};

// Fast structural self-test: exactness identities on small random instances
// (unitarity, symmetry, the resummed block identity, coupling round trips,
// transport-factor identities). Prints one line per group.
bool run_invariant_suite(std::ostream& log, std::uint64_t seed = 42);

// Execute the sweep and the four statistical checks, write outputs, report.
// Returns the process exit code: 0 all gates pass, 1 a gate failed,
// 2 configuration/usage error.
int run(const RunSpec& spec, std::ostream& log);

}  // namespace rmtrans
