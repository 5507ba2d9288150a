#pragma once

#include <stdexcept>
#include <string>

namespace loadlens {

// Exit codes used by the CLI: 1 usage, 2 input format, 3 domain.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
  FormatError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace loadlens
