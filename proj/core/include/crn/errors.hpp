#pragma once

#include <stdexcept>
#include <string>

namespace crn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define CRN_DECLARE_ERROR(Name)             \
    class Name : public Error {             \
      public:                               \
        using Error::Error;                 \
    }

CRN_DECLARE_ERROR(NegativeCount);
CRN_DECLARE_ERROR(CountOverflow);
CRN_DECLARE_ERROR(IsolatedSpecies);
CRN_DECLARE_ERROR(SearchBudgetExceeded);
CRN_DECLARE_ERROR(NotInK2);
CRN_DECLARE_ERROR(FastTermUnresolved);
CRN_DECLARE_ERROR(EmptyStateSpace);
CRN_DECLARE_ERROR(NotIrreducible);
CRN_DECLARE_ERROR(NoRootInRange);
CRN_DECLARE_ERROR(Exploded);
CRN_DECLARE_ERROR(StepSizeUnderflow);
CRN_DECLARE_ERROR(GridMismatch);
CRN_DECLARE_ERROR(ModelNotClosed);
CRN_DECLARE_ERROR(ExprError);
CRN_DECLARE_ERROR(ParseError);

#undef CRN_DECLARE_ERROR

}  // namespace crn
