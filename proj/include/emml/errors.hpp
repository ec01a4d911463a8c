#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emml {

// Base for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
public:
    using Error::Error;
};

class MissingColumn : public Error {
public:
    explicit MissingColumn(const std::string& name)
        : Error("missing column: '" + name + "'"), name_(name) {}
    const std::string& column_name() const { return name_; }

private:
    std::string name_;
};

class MalformedCsv : public Error {
public:
    MalformedCsv(std::size_t line, const std::string& detail)
        : Error("malformed CSV at line " + std::to_string(line) + ": " + detail), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyResult : public Error {
public:
    using Error::Error;
};

class TooFewRows : public Error {
public:
    using Error::Error;
};

class EmptyTable : public Error {
public:
    using Error::Error;
};

class UnknownOrdinalCategory : public Error {
public:
    UnknownOrdinalCategory(const std::string& column, const std::string& category)
        : Error("unknown ordinal category '" + category + "' in column '" + column + "'") {}
};

class NotFitted : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class EmptySpace : public Error {
public:
    using Error::Error;
};

} // namespace emml
