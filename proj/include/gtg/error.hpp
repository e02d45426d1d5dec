#pragma once

#include <stdexcept>
#include <string>

namespace gtg {

// Error taxonomy mirrors the CLI exit codes: config=2, data=3, numeric=4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Malformed files, broken contracts between pipeline stages, missing inputs.
struct DataError : Error {
  using Error::Error;
};

// Non-finite values escaping a numeric routine.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace gtg
