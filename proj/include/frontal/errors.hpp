#pragma once

#include <stdexcept>
#include <string>

namespace frontal {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The spherical chart degenerates: some partial product of cosines fell
// below the pole threshold. Distinct from a genuine normal-field
// singularity; callers work around it by rotating the data.
struct ChartPole : Error {
  explicit ChartPole(const std::string& what = "spherical chart pole")
      : Error(what) {}
};

// Input vector is not on the unit sphere within tolerance.
struct NotUnit : Error {
  explicit NotUnit(const std::string& what = "vector is not unit length")
      : Error(what) {}
};

// The angle-differential matrix is numerically rank deficient at this
// point; the coefficient system has no unique solution there.
struct SingularChart : Error {
  explicit SingularChart(const std::string& what = "singular angle differential")
      : Error(what) {}
};

// A point where neither direct recovery nor limit extension succeeded.
struct UnresolvedPoint : Error {
  explicit UnresolvedPoint(const std::string& what = "point could not be resolved")
      : Error(what) {}
};

// An evaluator produced a non finite value (division by zero or a domain
// violation inside a user supplied formula).
struct DomainError : Error {
  explicit DomainError(const std::string& what = "evaluator left its domain")
      : Error(what) {}
};

// Extrapolation needs at least three samples.
struct InsufficientSamples : Error {
  explicit InsufficientSamples(const std::string& what = "need at least 3 samples")
      : Error(what) {}
};

// Extrapolation steps must decrease geometrically with a fixed ratio.
struct NonGeometricSteps : Error {
  explicit NonGeometricSteps(const std::string& what = "steps are not geometric")
      : Error(what) {}
};

// Jacobian rank dropped below the source dimension where a regular point
// was required.
struct SingularPoint : Error {
  explicit SingularPoint(const std::string& what = "map is singular here")
      : Error(what) {}
};

struct UnknownExample : Error {
  explicit UnknownExample(const std::string& name)
      : Error("unknown example: " + name) {}
};

struct StageRequired : Error {
  explicit StageRequired(const std::string& what = "entry has a stage family; pass a stage")
      : Error(what) {}
};

struct StageNotApplicable : Error {
  explicit StageNotApplicable(const std::string& what = "entry has no stage family")
      : Error(what) {}
};

struct NoPrintedCoefficients : Error {
  explicit NoPrintedCoefficients(const std::string& what = "entry has no coefficient formulas")
      : Error(what) {}
};

struct DimensionUnsupported : Error {
  explicit DimensionUnsupported(const std::string& what = "operation requires n = 2")
      : Error(what) {}
};

struct IOError : Error {
  explicit IOError(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace frontal
