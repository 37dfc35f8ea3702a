#pragma once

#include <cstdint>
#include <vector>

#include "cdzsl/dictionary_training.hpp"
#include "cdzsl/matrix.hpp"
#include "cdzsl/sparse_coding.hpp"

namespace cdzsl {

/// Normalized Student's-t kernel similarities between a decoded attribute
/// vector and each unseen-class prototype.
struct SoftAssignment {
    Vector probabilities;       // length M, nonnegative, sums to 1
    double kernel_param = 1.0;  // rho
};

struct AawConfig {
    double sparsity = 0.1;         // lambda
    double entropy_weight = 0.05;  // gamma
    double kernel_param = 1.0;     // rho
    int max_iterations = 500;
    double tolerance = 1e-8;  // relative objective-decrease stop
    StepRule step_rule = StepRule::Backtracking;
    SolverOptions lasso;  // attribute-agnostic initialization solve
};

SoftAssignment soft_assignment(const Vector& code, const Matrix& d_z,
                               const Matrix& zprime, double rho);

/// -sum p log p with 0 log 0 := 0.
double assignment_entropy(const SoftAssignment& p);

struct AagResult {
    Vector code;
    Vector attribute;  // d_z * code
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Attribute-agnostic prediction: sparse-code x against d_x with weights
/// (1/p, lambda/r), decode through d_z.
AagResult aag_predict(const CoupledDictionary& dict, const Vector& x,
                      double lambda, const SolverOptions& opts);

/// Smooth part of the attribute-aware objective,
///   g(a) = (1/p) ||x - d_x a||^2 + gamma * H(p(a)),
/// and its analytic gradient.
struct SmoothEval {
    double value = 0.0;
    Vector gradient;
};
SmoothEval aaw_objective_and_gradient(const Vector& code, const Vector& x,
                                      const CoupledDictionary& dict,
                                      const Matrix& zprime,
                                      const AawConfig& cfg);

struct AawResult {
    Vector code;
    Vector attribute;
    std::vector<double> objective_trace;  // g + (lambda/r) l1, per iteration
    bool converged = true;
};

/// Attribute-aware prediction: proximal gradient on the entropy-regularized
/// objective, initialized from the attribute-agnostic code.
AawResult aaw_predict(const CoupledDictionary& dict, const Matrix& zprime,
                      const Vector& x, const AawConfig& cfg);

struct BatchPrediction {
    Matrix codes;       // r x L
    Matrix attributes;  // q x L
    std::vector<std::uint8_t> converged;

    bool all_converged() const;
};

BatchPrediction aag_predict_batch(const CoupledDictionary& dict,
                                  const Matrix& features, double lambda,
                                  const SolverOptions& opts, unsigned threads);
BatchPrediction aaw_predict_batch(const CoupledDictionary& dict,
                                  const Matrix& zprime, const Matrix& features,
                                  const AawConfig& cfg, unsigned threads);

}  // namespace cdzsl
