#pragma once

#include <stdexcept>
#include <string>

namespace algmatch {

// Faults raised by the library. Singularity is not a fault: operations whose
// answer may legitimately be "singular" return std::optional instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ALGMATCH_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(what) {}      \
    };

ALGMATCH_DEFINE_ERROR(NotPrime)
ALGMATCH_DEFINE_ERROR(ZeroInverse)
ALGMATCH_DEFINE_ERROR(FieldMismatch)
ALGMATCH_DEFINE_ERROR(DimensionMismatch)
ALGMATCH_DEFINE_ERROR(SingularPivotBlock)
ALGMATCH_DEFINE_ERROR(NotAllowed)
ALGMATCH_DEFINE_ERROR(NotStrictlyUpperTriangular)
ALGMATCH_DEFINE_ERROR(ForcedSetDependent)
ALGMATCH_DEFINE_ERROR(InternalConsistency)
ALGMATCH_DEFINE_ERROR(IndexReuse)
ALGMATCH_DEFINE_ERROR(DirtyParameters)
ALGMATCH_DEFINE_ERROR(RankDeficientMatroid)
ALGMATCH_DEFINE_ERROR(InvalidInstance)
ALGMATCH_DEFINE_ERROR(IllegalPartial)
ALGMATCH_DEFINE_ERROR(RandomnessExhausted)
ALGMATCH_DEFINE_ERROR(StaleBlock)
ALGMATCH_DEFINE_ERROR(TooLarge)
ALGMATCH_DEFINE_ERROR(ParseError)

#undef ALGMATCH_DEFINE_ERROR

}  // namespace algmatch
