#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aqf {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind {
    Usage = 1,    // bad invocation / bad configuration
    Data = 2,     // parse, schema, or cleaning failures
    Numeric = 3,  // singular regressions, non-finite losses
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void throw_usage(std::string code, const std::string& message) {
    throw Error(ErrorKind::Usage, std::move(code), message);
}

[[noreturn]] inline void throw_data(std::string code, const std::string& message) {
    throw Error(ErrorKind::Data, std::move(code), message);
}

[[noreturn]] inline void throw_numeric(std::string code, const std::string& message) {
    throw Error(ErrorKind::Numeric, std::move(code), message);
}

}  // namespace aqf
