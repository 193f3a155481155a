#ifndef BGMP_ERROR_HPP
#define BGMP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bgmp {

/// Invalid dimensions, probabilities, variances or flag values.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed instance or CSV file; carries the 1-based line of the offence.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Argument outside the mathematical domain of a scalar formula (e.g. v_s <= 0).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Non-finite value produced inside an iterative update or a failed factorization.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, long iteration = -1)
        : std::runtime_error(what), iteration_(iteration) {}
    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

} // namespace bgmp

#endif // BGMP_ERROR_HPP
