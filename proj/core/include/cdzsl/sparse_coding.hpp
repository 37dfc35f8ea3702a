#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdzsl/matrix.hpp"

namespace cdzsl {

enum class StepRule {
    FixedSpectral,  // step = 1/L, L from a one-time power iteration
    Backtracking,
};

struct SolverOptions {
    int max_iterations = 2000;
    double tolerance = 1e-10;  // relative objective-decrease stop
    bool acceleration = true;  // momentum with monotone acceptance
    StepRule step_rule = StepRule::FixedSpectral;
    unsigned threads = 1;       // batch solves only; 0 = hardware count
    bool record_trace = false;  // keep per-iteration objectives in the result
};

/// One l1-regularized least-squares instance,
///   minimize_a  data_weight * ||target - dictionary * a||^2
///             + sparsity_weight * ||a||_1.
/// Holds views, not copies; the referenced storage must outlive the solve.
struct LassoProblem {
    Eigen::Ref<const Matrix> dictionary;  // d x r
    Eigen::Ref<const Vector> target;      // d
    double sparsity_weight = 0.0;         // >= 0
    double data_weight = 1.0;             // > 0

    void validate() const;
};

struct LassoResult {
    Vector code;
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
    std::vector<double> trace;  // filled when record_trace is set
};

struct BatchLassoResult {
    Matrix codes;      // r x n, one column per target column
    Vector objectives;  // n
    std::vector<int> iterations;
    std::vector<std::uint8_t> converged;  // per-column status

    bool all_converged() const;
};

/// Proximal operator of t*||.||_1: componentwise sign(v) * max(|v| - t, 0).
Vector soft_threshold(const Vector& v, double t);
double soft_threshold_scalar(double v, double t);

/// Largest singular value estimated by power iteration from a fixed
/// deterministic start vector. Estimates from below; callers that need an
/// upper bound should add a margin.
double spectral_norm(const Matrix& m, int iterations = 50);

double lasso_objective(const LassoProblem& problem, const Vector& code);

/// Proximal-gradient LASSO solve. Warm start defaults to the zero vector;
/// coordinates whose dictionary column is exactly zero are pinned at zero.
/// The objective sequence is non-increasing; a tolerance miss is reported
/// through `converged`, never thrown.
LassoResult lasso_solve(const LassoProblem& problem, const SolverOptions& opts,
                        const std::optional<Vector>& warm_start = std::nullopt);

/// Cyclic coordinate descent run to 1e-10 per-coordinate stationarity.
/// Verification oracle for small instances; independent of lasso_solve.
Vector cd_lasso_oracle(const LassoProblem& problem);

/// Solves one LASSO per column of `targets` against a shared dictionary.
/// Column results depend only on that column and the options, so the output
/// is identical for any thread count.
BatchLassoResult batch_lasso(const Matrix& dictionary, const Matrix& targets,
                             double data_weight, double sparsity_weight,
                             const SolverOptions& opts,
                             const Matrix* warm_start = nullptr);

/// Subgradient optimality certificate at `code`:
///   code_i != 0:  |grad_i + lambda * sign(code_i)| <= rel_tol * lambda
///   code_i == 0:  |grad_i| <= lambda * (1 + rel_tol)
/// with grad the fidelity gradient. Meaningful only for sparsity_weight > 0.
struct OptimalityCheck {
    bool ok = false;
    double worst_nonzero = 0.0;  // max |grad_i + lambda*sign|
    double worst_zero = 0.0;     // max |grad_i| over zero coordinates
};
OptimalityCheck check_optimality(const LassoProblem& problem,
                                 const Vector& code, double rel_tol = 1e-4);

namespace detail {
/// Shared core used by lasso_solve and batch_lasso so both take the exact
/// same floating-point path for a given spectral bound.
LassoResult solve_with_spectral_bound(const LassoProblem& problem,
                                      double sigma_max,
                                      const SolverOptions& opts,
                                      const Vector& warm_start);
}  // namespace detail

}  // namespace cdzsl
