#pragma once

#include <stdexcept>
#include <string>

namespace codafin {

// Broad failure categories; the CLI maps them onto exit codes.
enum class ErrorKind { usage, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidComposition : Error {
    explicit InvalidComposition(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// A part that cannot be imputed because it has no positive values at all.
struct UnimputablePart : Error {
    explicit UnimputablePart(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

}  // namespace codafin
