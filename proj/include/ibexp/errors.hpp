#pragma once
#include <stdexcept>
#include <string>

namespace ibexp {

// malformed input, maps to CLI exit code 2
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// enumeration or table exceeds a hard size cap, exit code 3
struct SizeCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a verified invariant did not hold, exit code 4
struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

}  // namespace ibexp
