#pragma once

#include <stdexcept>
#include <string>

namespace stepscat {

// Base for rejected inputs: ill-formed, inconsistent, or outside the model's
// admissible class. CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Base for failures of the numerical machinery on admissible inputs.
// CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define STEPSCAT_VALIDATION_ERROR(Name)                                        \
    class Name : public ValidationError {                                      \
    public:                                                                    \
        explicit Name(const std::string& what) : ValidationError(#Name, what) {} \
    }

#define STEPSCAT_NUMERICAL_ERROR(Name)                                         \
    class Name : public NumericalError {                                       \
    public:                                                                    \
        explicit Name(const std::string& what) : NumericalError(#Name, what) {} \
    }

// model / input validation
STEPSCAT_VALIDATION_ERROR(SignConditionViolated);
STEPSCAT_VALIDATION_ERROR(AllZeroCoefficients);
STEPSCAT_VALIDATION_ERROR(NegativeAbscissa);
STEPSCAT_VALIDATION_ERROR(NonHermitianData);
STEPSCAT_VALIDATION_ERROR(OutOfRange);

// integration / root finding
STEPSCAT_NUMERICAL_ERROR(TruncationTooSmall);
STEPSCAT_NUMERICAL_ERROR(StepRejected);
STEPSCAT_NUMERICAL_ERROR(CharacteristicVanishes);
STEPSCAT_NUMERICAL_ERROR(SearchCeilingHit);
STEPSCAT_NUMERICAL_ERROR(ContourThroughZero);
STEPSCAT_NUMERICAL_ERROR(NonpositiveNorm);
STEPSCAT_NUMERICAL_ERROR(BoundaryPolynomialVanishes);

// linear algebra / reconstruction
STEPSCAT_NUMERICAL_ERROR(IllConditioned);
STEPSCAT_NUMERICAL_ERROR(SingularSystem);
STEPSCAT_NUMERICAL_ERROR(FamilyIncomplete);
STEPSCAT_NUMERICAL_ERROR(InsufficientNodes);
STEPSCAT_NUMERICAL_ERROR(NoInteriorNodes);

#undef STEPSCAT_VALIDATION_ERROR
#undef STEPSCAT_NUMERICAL_ERROR

}  // namespace stepscat
