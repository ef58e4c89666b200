#pragma once

#include <stdexcept>
#include <string>

namespace slnp {

// Base of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs: malformed datasets, bad files, shape/parameter violations.
// The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: factorizations that cannot proceed, non-convergent
// iterations. The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Command-line misuse. The CLI maps these to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

#define SLNP_DEFINE_DATA_ERROR(Name) \
  class Name final : public DataError { \
   public: \
    using DataError::DataError; \
  }

#define SLNP_DEFINE_NUMERIC_ERROR(Name) \
  class Name final : public NumericError { \
   public: \
    using NumericError::NumericError; \
  }

// Dataset validation.
SLNP_DEFINE_DATA_ERROR(LabelOutOfRange);
SLNP_DEFINE_DATA_ERROR(EmptyClass);
SLNP_DEFINE_DATA_ERROR(NonFiniteFeature);
SLNP_DEFINE_DATA_ERROR(PartitionMismatch);

// Shared numeric-input validation.
SLNP_DEFINE_DATA_ERROR(NonFiniteInput);
SLNP_DEFINE_DATA_ERROR(ShapeMismatch);
SLNP_DEFINE_DATA_ERROR(KTooLarge);
SLNP_DEFINE_DATA_ERROR(GammaZero);
SLNP_DEFINE_DATA_ERROR(SingleSample);
SLNP_DEFINE_DATA_ERROR(DimensionTooLarge);
SLNP_DEFINE_DATA_ERROR(NotSymmetric);
SLNP_DEFINE_DATA_ERROR(NoIterations);
SLNP_DEFINE_DATA_ERROR(Empty);

// File loading.
SLNP_DEFINE_DATA_ERROR(FileNotFound);
SLNP_DEFINE_DATA_ERROR(BadMagic);
SLNP_DEFINE_DATA_ERROR(TruncatedFile);
SLNP_DEFINE_DATA_ERROR(CountMismatch);
SLNP_DEFINE_DATA_ERROR(RaggedRow);
SLNP_DEFINE_DATA_ERROR(NonNumericCell);
SLNP_DEFINE_DATA_ERROR(MissingColumn);
SLNP_DEFINE_DATA_ERROR(BadPgmHeader);
SLNP_DEFINE_DATA_ERROR(GeometryMismatch);

// Sampling and evaluation.
SLNP_DEFINE_DATA_ERROR(NotEnoughSamples);
SLNP_DEFINE_DATA_ERROR(LengthMismatch);
SLNP_DEFINE_DATA_ERROR(UnknownClass);
SLNP_DEFINE_DATA_ERROR(EmptyTrainSet);
SLNP_DEFINE_DATA_ERROR(NoWatchedSample);

// Factorizations.
SLNP_DEFINE_NUMERIC_ERROR(NotPositiveDefinite);
SLNP_DEFINE_NUMERIC_ERROR(NoConvergence);

#undef SLNP_DEFINE_DATA_ERROR
#undef SLNP_DEFINE_NUMERIC_ERROR

}  // namespace slnp
