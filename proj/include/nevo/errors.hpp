#pragma once

#include <stdexcept>
#include <string>

namespace nevo {

// Bad user-supplied configuration (flags, descriptors, file contents).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an API precondition (arity mismatch, bad node id, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Failure while a run is in flight (worker timeout, dataset exhausted, ...).
class RunError : public std::runtime_error {
public:
    explicit RunError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nevo
