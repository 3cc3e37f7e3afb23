#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ocp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or inconsistent input detected while building a linear system.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// A linear solve or a time step could not be completed.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual = 0.0, int iterations = 0)
        : Error(what), residual_(residual), iterations_(iterations) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Configuration failed schema validation. Each problem names the offending key path.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid configuration:";
        for (const auto& item : items) {
            out += "\n  ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace ocp
