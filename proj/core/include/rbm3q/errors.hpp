#pragma once

#include <stdexcept>
#include <string>

namespace rbm3q {

// Base for all domain/validation failures. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonElliptic : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct SymmetryRequired : Error {
  using Error::Error;
};
struct ComplexRoots : Error {
  using Error::Error;
};
struct OnCut : Error {
  using Error::Error;
};
struct NotOnCut : Error {
  using Error::Error;
};
struct RegionAmbiguous : Error {
  using Error::Error;
};
struct DomainViolation : Error {
  using Error::Error;
};
struct MissingEstimate : Error {
  using Error::Error;
};
struct InsufficientBoundaryVisits : Error {
  using Error::Error;
};
struct StuckAtCorner : Error {
  using Error::Error;
};
struct CutoffTooTight : Error {
  using Error::Error;
};
struct DeltaZero : Error {
  using Error::Error;
};
struct CoefficientZero : Error {
  using Error::Error;
};
struct OutsideDomain : Error {
  using Error::Error;
};
struct OutsideWedge : Error {
  using Error::Error;
};
struct NotInFamily : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};
struct PoleNearby : Error {
  using Error::Error;
};
struct PoleSuspected : Error {
  using Error::Error;
};

}  // namespace rbm3q
