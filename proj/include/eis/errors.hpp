#pragma once

#include <stdexcept>
#include <string>

namespace eis {

// Error families map to CLI exit codes: ParseError -> 1, ValidationError -> 2,
// SolverError -> 3, RankDeficient -> 4.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define EIS_VALIDATION_ERROR(NAME)                 \
    struct NAME : ValidationError {                \
        explicit NAME(const std::string& msg)      \
            : ValidationError(#NAME ": " + msg) {} \
    }
#define EIS_SOLVER_ERROR(NAME)                 \
    struct NAME : SolverError {                \
        explicit NAME(const std::string& msg)  \
            : SolverError(#NAME ": " + msg) {} \
    }

EIS_VALIDATION_ERROR(SeparationViolation);
EIS_VALIDATION_ERROR(DegenerateGeometry);
EIS_VALIDATION_ERROR(PointOutsideDomain);
EIS_VALIDATION_ERROR(UnknownModel);
EIS_VALIDATION_ERROR(MeshBudgetExceeded);
EIS_VALIDATION_ERROR(InfeasibleResolution);
EIS_VALIDATION_ERROR(MeshNotInterfaceReady);
EIS_VALIDATION_ERROR(MeshMismatch);
EIS_VALIDATION_ERROR(DegenerateContrast);
EIS_VALIDATION_ERROR(ZeroLambda);
EIS_VALIDATION_ERROR(NotASegment);
EIS_VALIDATION_ERROR(OnBranchCut);
EIS_VALIDATION_ERROR(AtPole);
EIS_VALIDATION_ERROR(MissingFluxData);
EIS_VALIDATION_ERROR(CoincidentPoints);
EIS_VALIDATION_ERROR(NonUniformSampling);
EIS_VALIDATION_ERROR(ShapeMismatch);
EIS_VALIDATION_ERROR(NonPositiveAlpha);
EIS_VALIDATION_ERROR(BadConfig);

EIS_SOLVER_ERROR(SingularSystem);
EIS_SOLVER_ERROR(NonConvergence);
EIS_SOLVER_ERROR(PoleOutsideCircle);

struct RankDeficient : SolverError {
    explicit RankDeficient(const std::string& msg) : SolverError("RankDeficient: " + msg) {}
};

#undef EIS_VALIDATION_ERROR
#undef EIS_SOLVER_ERROR

}  // namespace eis
