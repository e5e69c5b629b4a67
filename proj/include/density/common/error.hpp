#pragma once

#include <stdexcept>
#include <string>

namespace density {

// Error categories surfaced by the CLI as "error: <category>: <message>".
enum class ErrorCategory {
    Config,      // invalid configuration or model description
    Io,          // file system and format parse failures
    Shape,       // tensor/layer dimension mismatches
    Data,        // dataset semantics (missing views, empty splits, bad labels)
    Numeric,     // non-finite values where finite ones are required
    Degenerate,  // statistics that are undefined on the given input
};

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

// Report parsing found two different canonical density phrases.
class AmbiguousDensityError : public Error {
public:
    AmbiguousDensityError(int first_class, int second_class, const std::string& message)
        : Error(ErrorCategory::Data, message),
          first_class_(first_class),
          second_class_(second_class) {}

    int first_class() const { return first_class_; }
    int second_class() const { return second_class_; }

private:
    int first_class_;
    int second_class_;
};

}  // namespace density
