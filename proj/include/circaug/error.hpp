#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace circaug {

/// Bad input: shape mismatch, non-finite values, out-of-range parameters.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file content. Carries the file and, when known, the line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          file_(file),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// GAN training diverged (non-finite loss) at a known epoch/step.
class TrainingError : public std::runtime_error {
public:
    TrainingError(std::size_t epoch, std::size_t step, const std::string& what)
        : std::runtime_error("epoch " + std::to_string(epoch) + ", step " + std::to_string(step) + ": " + what),
          epoch_(epoch),
          step_(step) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t epoch_;
    std::size_t step_;
};

}  // namespace circaug
