#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace trigs {

/// Values at or below this are treated as rounding noise by the diagnostics.
inline constexpr double kRoundingFloor = 1e-14;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter. `key()` names the offending setting.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Operation not available for this objective (e.g. gradient of |x|).
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A theorem-level precondition was not verified before asking for its bound.
class UnverifiedCondition : public Error {
public:
    using Error::Error;
};

/// Too few usable points for a least-squares rate fit.
class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace trigs
