#pragma once

#include <stdexcept>
#include <string>

namespace locsym {

// Exit statuses of the batch interface; every library error maps onto one.
enum class ExitCode : int {
    Success = 0,
    ConfigError = 1,
    UnsupportedGroup = 2,
    ResourceCapExceeded = 3,
    NumericalFailure = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::ConfigError, what) {}
};

class UnsupportedGroupError : public Error {
public:
    explicit UnsupportedGroupError(const std::string& what) : Error(ExitCode::UnsupportedGroup, what) {}
};

class ResourceCapError : public Error {
public:
    explicit ResourceCapError(const std::string& what) : Error(ExitCode::ResourceCapExceeded, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ExitCode::NumericalFailure, what) {}
};

} // namespace locsym
