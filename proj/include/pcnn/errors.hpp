#pragma once

#include <stdexcept>
#include <string>

namespace pcnn {

/// A path that cannot be opened for reading or writing. Kept separate from
/// other runtime failures so the CLI can map it to its own exit code.
struct FileError : std::runtime_error {
  explicit FileError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pcnn
