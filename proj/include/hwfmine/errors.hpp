#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hwfmine {

// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (XML, JSON, ...). Carries source position when known.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line, std::size_t column)
        : error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}
    explicit parse_error(const std::string& what) : error(what), line_(0), column_(0) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Unreadable or semantically invalid input (missing file, bad reference, ...).
class input_error : public error {
public:
    using error::error;
};

// Activity partition violates the required constraints; the message carries
// the violation report, including refinement hints for loop conflicts.
class partition_error : public error {
public:
    using error::error;
};

// An exploration or enumeration budget was exhausted where a complete answer
// was required.
class budget_error : public error {
public:
    using error::error;
};

} // namespace hwfmine
