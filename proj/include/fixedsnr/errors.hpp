#pragma once

#include <stdexcept>
#include <string>

namespace fixedsnr {

// Each error family maps to one process exit code in the command-line tool.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class ColoringError : public std::runtime_error {
 public:
  explicit ColoringError(const std::string& what) : std::runtime_error(what) {}
};

class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitColoring = 3;
inline constexpr int kExitInvariant = 4;

}  // namespace fixedsnr
