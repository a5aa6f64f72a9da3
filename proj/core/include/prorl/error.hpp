#pragma once

#include <stdexcept>
#include <string>

namespace prorl {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// The flow polytope has no point compatible with the data support or cap.
class InfeasibleError : public Error {
public:
    InfeasibleError(int state, const std::string& what)
        : Error(what), state_(state) {}
    int state() const noexcept { return state_; }

private:
    int state_;
};

class SolverError : public Error {
public:
    using Error::Error;
};

// Raised by the end-to-end pipeline; names the stage that failed.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace prorl
