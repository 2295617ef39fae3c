#pragma once

#include <stdexcept>
#include <string>

namespace expsum {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EXPSUM_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// modarith
EXPSUM_DEFINE_ERROR(NonInvertible);
EXPSUM_DEFINE_ERROR(ModuliNotCoprime);
EXPSUM_DEFINE_ERROR(ZeroInput);
EXPSUM_DEFINE_ERROR(EvenPrime);
EXPSUM_DEFINE_ERROR(NonResidue);
EXPSUM_DEFINE_ERROR(InvalidArgument);

// arith
EXPSUM_DEFINE_ERROR(IdentityViolation);

// expsums
EXPSUM_DEFINE_ERROR(BadModulus);
EXPSUM_DEFINE_ERROR(NotDegenerate);

// charsums
EXPSUM_DEFINE_ERROR(HypothesisViolated);
EXPSUM_DEFINE_ERROR(SingularTransform);
EXPSUM_DEFINE_ERROR(NotSquareFree);

// voronoi
EXPSUM_DEFINE_ERROR(NonPositiveArgument);
EXPSUM_DEFINE_ERROR(NonCoprime);
EXPSUM_DEFINE_ERROR(CutoffTooSmall);

// cli
EXPSUM_DEFINE_ERROR(ParseError);
EXPSUM_DEFINE_ERROR(ValidationError);

#undef EXPSUM_DEFINE_ERROR

}  // namespace expsum
