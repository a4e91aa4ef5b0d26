#pragma once

#include <stdexcept>
#include <string>

namespace probelab {

// Validation errors: bad input or parameters. The CLI maps these to exit 2.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct range_error : validation_error {
  using validation_error::validation_error;
};

// A word does not fit in the cell width.
struct encoding_error : validation_error {
  using validation_error::validation_error;
};

// Operation issued against a state where it is not legal (e.g. deleting an
// interval that is not present).
struct precondition_error : validation_error {
  using validation_error::validation_error;
};

struct shape_error : validation_error {
  using validation_error::validation_error;
};

struct config_error : validation_error {
  using validation_error::validation_error;
};

struct parse_error : validation_error {
  parse_error(const std::string& what, std::size_t line)
      : validation_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A file could not be opened or written.
struct io_error : validation_error {
  using validation_error::validation_error;
};

// Internal invariant broken. The CLI maps these to exit 3.
struct invariant_violation : std::logic_error {
  using std::logic_error::logic_error;
};

// Re-running a structure produced a different probe sequence.
struct integrity_error : invariant_violation {
  using invariant_violation::invariant_violation;
};

}  // namespace probelab
