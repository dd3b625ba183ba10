#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gauss_engine {

enum class ErrorKind {
    NonSymmetric,
    NotPositiveDefinite,
    NegativeTemperature,
    LayoutMismatch,
    EmptySubset,
    IndexOutOfRange,
    UnphysicalState,
    BadPartition,
    SymplecticityLost,
    NoHeatInput,
    UnknownKey,
    ParseError,
    InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NegativeTemperature: return "NegativeTemperature";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnphysicalState: return "UnphysicalState";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::SymplecticityLost: return "SymplecticityLost";
    case ErrorKind::NoHeatInput: return "NoHeatInput";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so
/// callers (the CLI, the sweep harness) can report which invariant broke.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace gauss_engine
