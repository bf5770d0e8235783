#pragma once

#include <stdexcept>
#include <string>

namespace gplaid {

// Error categories. They map one-to-one onto the C API status codes and the
// CLI exit codes (config = 2, data = 3, runtime = 4).

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gplaid
