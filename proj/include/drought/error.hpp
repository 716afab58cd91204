#pragma once

#include <stdexcept>
#include <string>

namespace drought {

// Error categories map onto CLI exit codes: config = 2, input = 3, numeric = 4.
enum class ErrorCategory { config = 2, input = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(ErrorCategory::input, msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(ErrorCategory::numeric, msg) {}
};

}  // namespace drought
