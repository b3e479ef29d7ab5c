#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raingen {

enum class Errc {
    invalid_argument,
    parse,
    validation,
    too_short,
    fit_failed,
    degenerate,
    io,
};

[[nodiscard]] std::string_view to_string(Errc code) noexcept;

/// Base error for everything the library throws.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Error raised by the pipeline; carries the name of the stage that failed.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const Error& cause)
        : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace raingen
