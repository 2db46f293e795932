#pragma once

#include <stdexcept>
#include <string>

namespace lcsb {

// Invalid configuration / usage; the CLI maps this to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad data, I/O failure, corruption; the CLI maps this to exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lcsb
