#pragma once

#include <stdexcept>
#include <string>

namespace hacover {

// Base class for all library errors.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition (wrong N, empty preset set, ...).
class parameter_error : public error {
  public:
    using error::error;
};

// Malformed or inconsistent input data (CSV rows, JSON files, predicates).
class validation_error : public error {
  public:
    using error::error;
};

// Filesystem-level failure (missing file, unwritable path).
class io_error : public error {
  public:
    using error::error;
};

// Model fit failure (degenerate samples, rank-deficient data).
class fit_error : public error {
  public:
    using error::error;
};

}  // namespace hacover
