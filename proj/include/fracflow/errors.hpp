#pragma once

#include <stdexcept>
#include <string>

namespace fracflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid or fracture geometry that cannot be discretized.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent case/config input. `path()` names the offending
/// entry, e.g. "fluid.mu_w" or "case1.frac:12".
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Operation that requires a non-empty fracture subdomain was given none.
class EmptySubdomain : public Error {
public:
    using Error::Error;
};

} // namespace fracflow
