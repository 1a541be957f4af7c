#pragma once

#include <stdexcept>
#include <string>

namespace ctrw {

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& m) : std::runtime_error("QuadratureFailure: " + m) {}
};
struct NonIntegrableMeasure : std::runtime_error {
    explicit NonIntegrableMeasure(const std::string& m) : std::runtime_error("NonIntegrableMeasure: " + m) {}
};
struct InsufficientGrid : std::runtime_error {
    explicit InsufficientGrid(const std::string& m) : std::runtime_error("InsufficientGrid: " + m) {}
};
struct DegenerateTruncation : std::runtime_error {
    explicit DegenerateTruncation(const std::string& m) : std::runtime_error("DegenerateTruncation: " + m) {}
};
struct RootNotBracketed : std::runtime_error {
    explicit RootNotBracketed(const std::string& m) : std::runtime_error("RootNotBracketed: " + m) {}
};
struct UnsupportedSymbol : std::runtime_error {
    explicit UnsupportedSymbol(const std::string& m) : std::runtime_error("UnsupportedSymbol: " + m) {}
};
struct SeriesDivergence : std::runtime_error {
    explicit SeriesDivergence(const std::string& m) : std::runtime_error("SeriesDivergence: " + m) {}
};
struct JumpCountMismatch : std::runtime_error {
    explicit JumpCountMismatch(const std::string& m) : std::runtime_error("JumpCountMismatch: " + m) {}
};
struct TooManyJumps : std::runtime_error {
    explicit TooManyJumps(const std::string& m) : std::runtime_error("TooManyJumps: " + m) {}
};
struct ZeroProgress : std::runtime_error {
    explicit ZeroProgress(const std::string& m) : std::runtime_error("ZeroProgress: " + m) {}
};
struct UnboundedSymbolRequired : std::runtime_error {
    explicit UnboundedSymbolRequired(const std::string& m) : std::runtime_error("UnboundedSymbolRequired: " + m) {}
};
struct MarginalMismatch : std::runtime_error {
    explicit MarginalMismatch(const std::string& m) : std::runtime_error("MarginalMismatch: " + m) {}
};
struct HorizonTooSmall : std::runtime_error {
    explicit HorizonTooSmall(const std::string& m) : std::runtime_error("HorizonTooSmall: " + m) {}
};
struct EmptySample : std::runtime_error {
    explicit EmptySample(const std::string& m) : std::runtime_error("EmptySample: " + m) {}
};
struct NonPositiveData : std::runtime_error {
    explicit NonPositiveData(const std::string& m) : std::runtime_error("NonPositiveData: " + m) {}
};
struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& m) : std::runtime_error("ConfigInvalid: " + m) {}
};
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& m) : std::runtime_error("InvariantViolation: " + m) {}
};

} // namespace ctrw
