#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cdzsl/matrix.hpp"
#include "cdzsl/rng.hpp"
#include "cdzsl/sparse_coding.hpp"

namespace cdzsl {

/// Seen features with per-sample attributes, plus attribute prototypes of
/// the classes that have no visual data.
struct TrainingSet {
    Matrix seen_features;      // X: p x N
    Matrix seen_attributes;    // Z: q x N, column i describes sample i
    Matrix unseen_prototypes;  // Z': q x M

    void validate() const;
};

struct TrainingConfig {
    Index atom_count = 64;      // shared code length r; r > max(p, q) recommended
    double sparsity = 0.1;      // lambda
    double dict_penalty = 0.0;  // beta, Frobenius penalty on the dictionaries
    int outer_iterations = 30;
    int inner_alternations = 2;
    Index batch_size = 0;    // samples per mini-batch; 0 = full batch
    double dict_step = 0.0;  // gradient step; 0 = auto from a spectral bound
    std::uint64_t seed = 7;
    bool normalize_columns = true;  // keep dictionary columns in the unit ball
    bool normalize_data = true;     // l2-normalize data columns before training
    SolverOptions lasso;
    std::filesystem::path checkpoint_dir;  // empty = no checkpoints
    int checkpoint_every = 10;

    void validate(Index sample_count) const;
};

struct CoupledDictionary {
    Matrix d_x;  // p x r
    Matrix d_z;  // q x r

    Index atoms() const { return d_x.cols(); }
    Index feature_dim() const { return d_x.rows(); }
    Index attribute_dim() const { return d_z.rows(); }
    void validate() const;
};

/// Scaled terms of the training objective
///   (1/(Np)) ||X-DxA||^2 + (lambda/(Nr)) ||A||_1 + (1/(Nq)) ||Z-DzA||^2
///   + (1/(Mq)) ||Z'-DzB||^2 + (lambda/(Mr)) ||B||_1
struct TraceEntry {
    double x_fidelity = 0.0;
    double a_penalty = 0.0;
    double z_fidelity = 0.0;
    double zprime_fidelity = 0.0;
    double b_penalty = 0.0;

    double total() const {
        return x_fidelity + a_penalty + z_fidelity + zprime_fidelity + b_penalty;
    }
};
using TrainingTrace = std::vector<TraceEntry>;

struct TrainingResult {
    CoupledDictionary dictionary;
    Matrix codes_seen;    // A: r x N
    Matrix codes_unseen;  // B: r x M
    TrainingTrace trace;  // one entry per outer iteration
    bool all_lasso_converged = true;
};

/// Standard-normal matrix from a deterministic stream, columns rescaled to
/// unit l2 norm.
Matrix init_dictionary(Index rows, Index atoms, std::uint64_t seed);

/// Mutable state threaded through the alternating blocks.
struct TrainerState {
    Rng rng{0};
    double step_x = 0.0;  // persisted full-batch steps (halved on divergence)
    double step_z = 0.0;
    int outer_index = 0;
    bool lasso_converged = true;
};

/// One visual-block pass: inner_alternations rounds of a LASSO update of the
/// batch's code columns followed by a penalized gradient step on d_x.
void update_visual_block(Matrix& d_x, const Matrix& x, Matrix& a,
                         const TrainingConfig& cfg, TrainerState& state);

/// Attribute-block pass with the seen codes held fixed: LASSO for the
/// unseen codes b, then a gradient step on d_z fitting both Z and Z'.
void update_attribute_block(Matrix& d_z, const Matrix& z, const Matrix& zprime,
                            const Matrix& a, Matrix& b,
                            const TrainingConfig& cfg, TrainerState& state);

TraceEntry objective_terms(const Matrix& x, const Matrix& z,
                           const Matrix& zprime, const CoupledDictionary& dict,
                           const Matrix& a, const Matrix& b, double lambda);

TrainingResult train_coupled(const TrainingSet& data,
                             const TrainingConfig& config);

/// Checkpoint directory: d_x.cdzm, d_z.cdzm and a meta.txt with the keys a
/// later prediction run needs.
struct Checkpoint {
    CoupledDictionary dictionary;
    double lambda = 0.1;
    bool normalize_data = true;
};

void save_checkpoint(const std::filesystem::path& dir,
                     const CoupledDictionary& dict, const TrainingConfig& cfg);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace cdzsl
