#ifndef RADCLASS_ERRORS_HPP
#define RADCLASS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace radclass {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad pipeline/CLI configuration (maps to exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// signal_io
struct ZeroSignalError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct UnsupportedModulationError : Error {
    using Error::Error;
};
struct TooFewSamplesError : Error {
    using Error::Error;
};

// features
struct TooShortError : Error {
    using Error::Error;
};
struct FeatureError : Error {
    // wraps a per-feature failure with the offending sample index
    FeatureError(std::size_t sample_index, const std::string& what)
        : Error("sample " + std::to_string(sample_index) + ": " + what), sample(sample_index) {}
    std::size_t sample;
};

// lda
struct EmptyClassError : Error {
    using Error::Error;
};
struct RankDeficientError : Error {
    using Error::Error;
};
struct SingularScatterError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};
struct DegenerateDenominatorError : Error {
    using Error::Error;
};

// nrs
struct EmptyAttributeSetError : Error {
    using Error::Error;
};
struct AttributeAlreadyPresentError : Error {
    using Error::Error;
};

// classify
struct BadTargetCountError : Error {
    using Error::Error;
};
struct FoldClassMissingError : Error {
    using Error::Error;
};

// pipeline / artifacts
struct MissingArtifactError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};

struct InvalidArgumentError : Error {
    using Error::Error;
};

}  // namespace radclass

#endif
