#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace owc {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries one message per violated invariant, each prefixed with the
// offending field path.
struct ValidationError : std::runtime_error {
    std::vector<std::string> violations;

    explicit ValidationError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}

    static std::string join(const std::vector<std::string>& v) {
        std::string s = "scenario validation failed:";
        for (const auto& m : v) {
            s += "\n  - ";
            s += m;
        }
        return s;
    }
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace owc
