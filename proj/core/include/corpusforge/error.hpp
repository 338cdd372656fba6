#pragma once

#include <stdexcept>
#include <string>

namespace corpusforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data violates a documented contract (bad manifest row, duplicate id,
// dimension mismatch, malformed header, ...). Maps to CLI exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// An artifact changed on disk after production or was produced under a
// different config. Maps to CLI exit code 3.
struct ProvenanceError : Error {
  using Error::Error;
};

}  // namespace corpusforge
