#ifndef IPD_ERROR_HPP
#define IPD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipd {

// Bad caller input: dimension mismatch, out-of-range parameters, ragged CSV.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t row, const std::string& what)
        : InputError("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant. Never expected on valid input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ipd

#endif  // IPD_ERROR_HPP
