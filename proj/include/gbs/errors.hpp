#ifndef GBS_ERRORS_HPP
#define GBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gbs {

// Base of all typed domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NonSquare : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct NotACycle : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct NotReduced : Error { using Error::Error; };
struct InvalidHGraph : Error { using Error::Error; };
struct TransferViolation : Error { using Error::Error; };
struct SaturationBound : Error { using Error::Error; };
struct UnsupportedShape : Error { using Error::Error; };
struct MixedGog : Error { using Error::Error; };
struct BadRank : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };
struct InvalidRep : Error { using Error::Error; };
// A bounded search ran out of its depth/state budget without an answer.
struct SearchExhausted : Error { using Error::Error; };

// Breach of an internal invariant; maps to exit code 70 in the CLI.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace gbs

#endif // GBS_ERRORS_HPP
