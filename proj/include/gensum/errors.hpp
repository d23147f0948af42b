#pragma once

#include <stdexcept>
#include <string>

namespace gensum {

// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An enumeration or memory budget would be exceeded. The CLI maps this to
// exit code 3. Oracles refuse instead of truncating.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A truncated series did not meet its tolerance within the term cap.
class SeriesNotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gensum
