#pragma once

#include <stdexcept>
#include <string>

namespace kineme {

/// Base of everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or insufficient input. CLI exit code 2.
struct DataError : Error {
    using Error::Error;
};

/// A numerical procedure could not complete. CLI exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

// --- pose / segmentation ---

struct SeriesTooShort : DataError {
    using DataError::DataError;
};
struct InvalidOverlap : DataError {
    using DataError::DataError;
};
struct MixedSegmentLength : DataError {
    using DataError::DataError;
};
struct EmptyInput : DataError {
    using DataError::DataError;
};
struct DimensionMismatch : DataError {
    using DataError::DataError;
};

// --- factorization ---

struct NegativeInput : DataError {
    using DataError::DataError;
};
struct RankTooLarge : DataError {
    using DataError::DataError;
};

// --- mixture ---

struct TooFewPoints : DataError {
    using DataError::DataError;
};
struct DegenerateComponent : NumericalError {
    using NumericalError::NumericalError;
};

// --- codebook ---

struct InsufficientData : DataError {
    using DataError::DataError;
};

// --- action units ---

struct TrackTooShort : DataError {
    using DataError::DataError;
};

// --- predictors ---

struct EmptyCorpus : DataError {
    using DataError::DataError;
};
struct SymbolOutOfRange : DataError {
    using DataError::DataError;
};
struct WidthMismatch : DataError {
    using DataError::DataError;
};
struct LengthMismatch : DataError {
    using DataError::DataError;
};
struct LossHeadMismatch : DataError {
    using DataError::DataError;
};

// --- analytics ---

struct EmptyScores : DataError {
    using DataError::DataError;
};
struct TooFewVideos : DataError {
    using DataError::DataError;
};
struct DegenerateCovariance : NumericalError {
    using NumericalError::NumericalError;
};

// --- ingestion / chunking ---

struct MissingColumn : DataError {
    using DataError::DataError;
};
struct EmptyFile : DataError {
    using DataError::DataError;
};
struct MalformedRow : DataError {
    using DataError::DataError;
};
struct ChunkTooShort : DataError {
    using DataError::DataError;
};

}  // namespace kineme
