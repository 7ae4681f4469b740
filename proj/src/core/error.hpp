#pragma once

#include <stdexcept>
#include <string>

namespace hyperbolize {

enum class ErrorCode {
  InvalidArgument,
  InversionPole,
  DegenerateTriple,
  DegenerateGeodesic,
  DegenerateCrossRatio,
  PointAtInfinity,
  NotEuclideanSignature,
  NotHyperbolic,
  NotWallpaperSignature,
  TargetNotHyperbolic,
  Unsupported,
  WordLengthExceeded,
  LabelMismatch,
  GridTooCoarse,
  GridTooCoarseNearCorner,
  OutsideInterpolationDomain,
  SearchFailed,
  NoUniqueFixedPoint,
  TooLarge,
  NotConverged,
  Io,
  Format,
  Checksum,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyperbolize
