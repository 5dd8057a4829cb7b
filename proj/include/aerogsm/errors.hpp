#pragma once

#include <stdexcept>
#include <string>

namespace aerogsm {

/// Raised when a scenario or simulation configuration is malformed or
/// inconsistent. Carries a source location when the error came from a file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
    ConfigError(const std::string& what, int line, int column)
        : std::runtime_error(what + " (line " + std::to_string(line + 1) + ", column " +
                             std::to_string(column + 1) + ")"),
          line_(line),
          column_(column) {}

    /// Zero-based; -1 when unknown.
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

    /// Same error and location, message prefixed with `context`.
    ConfigError prefixed(const std::string& context) const {
        ConfigError e(context + what());
        e.line_ = line_;
        e.column_ = column_;
        return e;
    }

private:
    int line_ = -1;
    int column_ = -1;
};

/// A state-machine transition was requested from the wrong state.
class IllegalStateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A station sits closer to a victim than one wavelength, where free-space
/// path loss does not apply.
class SubWavelengthDistance : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace aerogsm
