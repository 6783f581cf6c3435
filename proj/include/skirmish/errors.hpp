#pragma once

#include <stdexcept>
#include <string>

namespace skirmish {

struct IllegalActionError : std::runtime_error {
    explicit IllegalActionError(const std::string& what) : std::runtime_error(what) {}
};

struct AlreadyTerminalError : std::runtime_error {
    AlreadyTerminalError() : std::runtime_error("step() on a terminal state") {}
};

struct NotTerminalError : std::runtime_error {
    NotTerminalError() : std::runtime_error("reward requested on a non-terminal state") {}
};

struct TerminalStateError : std::runtime_error {
    explicit TerminalStateError(const std::string& what) : std::runtime_error(what) {}
};

struct DeadAgentError : std::runtime_error {
    explicit DeadAgentError(int agent)
        : std::runtime_error("agent " + std::to_string(agent) + " is dead") {}
};

struct EmptyRequestError : std::runtime_error {
    explicit EmptyRequestError(const std::string& what) : std::runtime_error(what) {}
};

struct IncompleteTensorError : std::runtime_error {
    explicit IncompleteTensorError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteLossError : std::runtime_error {
    explicit NonFiniteLossError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct MissingLogsError : std::runtime_error {
    explicit MissingLogsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace skirmish
