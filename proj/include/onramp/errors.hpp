#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onramp {

/// Raised for anything wrong with user-supplied files or parameters.
/// The CLI maps it to exit code 1; every other exception maps to 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed row in a line-oriented input file. `line()` is 1-based.
class ParseError : public InputError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace onramp
