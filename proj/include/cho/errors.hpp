#pragma once

#include <stdexcept>
#include <string>

namespace cho {

/// Base class for every error raised by the library. `kind()` is a stable,
/// machine-readable tag used in CLI failure records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CHO_DEFINE_ERROR(Name)                                                   \
    class Name : public Error {                                                  \
    public:                                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {}           \
    }

CHO_DEFINE_ERROR(InvalidArgument);
CHO_DEFINE_ERROR(ShapeMismatch);
CHO_DEFINE_ERROR(NonzeroMean);
CHO_DEFINE_ERROR(DomainViolation);
CHO_DEFINE_ERROR(ConvergenceFailure);
CHO_DEFINE_ERROR(WrongVariant);
CHO_DEFINE_ERROR(BadModeCount);
CHO_DEFINE_ERROR(NewtonFailure);
CHO_DEFINE_ERROR(CompatibilityError);
CHO_DEFINE_ERROR(ConfigurationError);
CHO_DEFINE_ERROR(ParseError);
CHO_DEFINE_ERROR(ValidationError);
CHO_DEFINE_ERROR(IoError);

#undef CHO_DEFINE_ERROR

/// Raised when a time step produces non-finite values; carries the index of
/// the step that failed (the step from n to n+1 reports n+1).
class NonFinite : public Error {
public:
    NonFinite(const std::string& what, int step)
        : Error("NonFinite", what), step_(step) {}

    [[nodiscard]] int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace cho
