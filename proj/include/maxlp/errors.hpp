#ifndef MAXLP_ERRORS_HPP
#define MAXLP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace maxlp {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A precondition on an argument was violated (bad rate, bad order, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Input is numerically degenerate (all-zero frame, singular normal equations).
class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& msg) : Error(msg) {}
};

// A sparsity/shape statistic is undefined for this input (all zeros, zero variance).
class UndefinedMetric : public Error {
public:
    explicit UndefinedMetric(const std::string& msg) : Error(msg) {}
};

// A frame could not be analyzed by any configured method.
class UnanalyzableFrame : public Error {
public:
    explicit UnanalyzableFrame(const std::string& msg) : Error(msg) {}
};

// Not enough data to produce a meaningful result (PCA with < 2 rows, ...).
class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

// Recursive filtering blew up (unstable model on a long input).
class NumericOverflow : public Error {
public:
    explicit NumericOverflow(const std::string& msg) : Error(msg) {}
};

// A file could not be parsed; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

}  // namespace maxlp

#endif
