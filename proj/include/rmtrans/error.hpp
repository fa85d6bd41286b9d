#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rmtrans {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Carries every violated invariant, not just the first one found.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(std::vector<std::string> problems)
        : std::invalid_argument(join(problems)), issues(std::move(problems)) {}
    std::vector<std::string> issues;

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "validation failed:";
        for (const auto& p : v) s += "\n  - " + p;
        return s;
    }
};

struct ParseError : std::runtime_error {
    ParseError(int line_number, const std::string& what_arg)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what_arg),
          line(line_number) {}
    int line;
};

struct SingularPropagator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularAtEnergy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonDecomposable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DefectiveMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rmtrans
