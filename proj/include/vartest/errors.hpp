#ifndef VARTEST_ERRORS_HPP
#define VARTEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vartest {

// Base class for all library errors. Subcommand handlers map these to
// exit code 2 (usage/data errors) unless stated otherwise.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define VARTEST_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& msg) : Error(msg) {}       \
    }

VARTEST_DEFINE_ERROR(DegreeExceeded);
VARTEST_DEFINE_ERROR(IndexOutOfRange);
VARTEST_DEFINE_ERROR(ShapeMismatch);
VARTEST_DEFINE_ERROR(NotOrthogonal);
VARTEST_DEFINE_ERROR(NotOnSphere);
VARTEST_DEFINE_ERROR(OutsideDisk);
VARTEST_DEFINE_ERROR(NotOnBoundary);
VARTEST_DEFINE_ERROR(NoFeasiblePoint);
VARTEST_DEFINE_ERROR(EmptyCloud);
VARTEST_DEFINE_ERROR(TooFewPoints);
VARTEST_DEFINE_ERROR(EpsilonOutOfRange);
VARTEST_DEFINE_ERROR(DeltaOutOfRange);
VARTEST_DEFINE_ERROR(BudgetExhausted);
VARTEST_DEFINE_ERROR(NotHypersurface);
VARTEST_DEFINE_ERROR(NonPositiveT);
VARTEST_DEFINE_ERROR(NetUnavailable);
VARTEST_DEFINE_ERROR(CrossedDiscriminant);
VARTEST_DEFINE_ERROR(ParseError);
VARTEST_DEFINE_ERROR(SchemaMismatch);

#undef VARTEST_DEFINE_ERROR

// Thrown by the tester when the cloud is smaller than the sample plan
// requires; carries the required count so callers can report it.
class InsufficientSamples : public Error {
public:
    InsufficientSamples(const std::string& msg, long long required)
        : Error(msg), required_m(required) {}
    long long required_m;
};

}  // namespace vartest

#endif
