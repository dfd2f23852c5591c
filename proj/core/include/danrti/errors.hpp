#pragma once

#include <stdexcept>
#include <string>

namespace danrti {

/// Bad or inconsistent configuration input (files, CLI values).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate or invalid geometry (coincident nodes, zero-length paths).
class GeometryError : public std::runtime_error {
  public:
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller violated an operation precondition (mismatched sizes, empty inputs).
class ContractError : public std::logic_error {
  public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Filesystem / serialization failure.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace danrti
