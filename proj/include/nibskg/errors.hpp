#pragma once

#include <stdexcept>
#include <string>

namespace nibskg {

// Error taxonomy shared by the whole engine. The CLI maps categories to
// process exit codes, the HTTP facade maps them to status codes.
enum class ErrorCode {
    DuplicateId,
    InvalidLabel,
    InvalidIri,
    UnknownEntity,
    PredicateNotProperty,
    NotFound,
    ParseError,
    DanglingReference,
    MalformedCsv,
    MissingTitleColumn,
    MappingError,
    QuerySyntax,
    UnknownPrefix,
    UnboundVariable,
    TypeMismatch,
    InvalidChunkSize,
    EmptyTable,
    BindFailure,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse-type failures carry a source location (1-based; column 0 when the
// position is line-granular).
class LocatedError : public Error {
public:
    LocatedError(ErrorCode code, std::size_t line, std::size_t column, const std::string& reason)
        : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + reason),
          line_(line), column_(column), reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

} // namespace nibskg
