#pragma once

#include <stdexcept>
#include <string>

namespace sessionsplit {

// Base class for everything this library throws on bad data or bad use.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Document-level structural problem (wrong header, not a CSV at all).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

// A specific row that should have parsed but did not.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptySeriesError : public Error {
public:
    explicit EmptySeriesError(const std::string& what) : Error(what) {}
};

class DuplicateEventError : public Error {
public:
    explicit DuplicateEventError(const std::string& what) : Error(what) {}
};

// Argument outside the mathematical domain of an operation
// (non-positive price, return <= -1, bad bin edges, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Input is valid but carries no usable signal (constant series, zero variance).
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(what) {}
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

// Two inputs that must line up (lengths, bin edges) do not.
class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error(what) {}
};

// Missing or unreadable input files at the orchestration layer.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

class FetchError : public Error {
public:
    FetchError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& what) : Error(what) {}
};

}  // namespace sessionsplit
