#pragma once

#include <stdexcept>
#include <string>

namespace hybridnet {

// Malformed or out-of-range input: bad coordinates, unparsable files,
// inconsistent matrix dimensions.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The input is well formed but the requested computation has no answer,
// e.g. sites that cannot be connected.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace hybridnet
