#pragma once

#include <stdexcept>
#include <string>

namespace aadeim {

// Numerical failure inside a kernel (non-finite input, singular factor, ...).
// The message names the operation that was running.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A model or solver produced a non-finite state. Carries the time-step index
// and the phase that was running so drivers can report where a run died.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& msg, long step, std::string phase)
        : std::runtime_error(msg + " (step " + std::to_string(step) + ", phase " + phase + ")"),
          step_(step),
          phase_(std::move(phase)) {}

    long step() const { return step_; }
    const std::string& phase() const { return phase_; }

private:
    long step_;
    std::string phase_;
};

// Config-file problem with a source location.
class config_error : public std::runtime_error {
public:
    config_error(const std::string& msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace aadeim
