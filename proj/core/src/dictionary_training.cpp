#include "cdzsl/dictionary_training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "cdzsl/config.hpp"
#include "cdzsl/errors.hpp"
#include "cdzsl/matrix_io.hpp"

namespace cdzsl {

namespace {

// Quadratic model of a dictionary-step objective
//   sum_i scale_i ||T_i - D C_i||^2 + beta ||D||^2
// collapsed into Gram form so step retries never touch the sample matrices:
//   obj(D) = t2 - 2<TC, D> + <D G, D> + beta ||D||^2.
struct QuadModel {
    Matrix gram;  // r x r
    Matrix tc;    // rows x r
    double t2 = 0.0;
    double beta = 0.0;

    void add_term(const Matrix& targets, const Matrix& codes, double scale) {
        if (gram.size() == 0) {
            gram = Matrix::Zero(codes.rows(), codes.rows());
            tc = Matrix::Zero(targets.rows(), codes.rows());
        }
        gram.noalias() += scale * (codes * codes.transpose());
        tc.noalias() += scale * (targets * codes.transpose());
        t2 += scale * targets.squaredNorm();
    }

    double value(const Matrix& d) const {
        return t2 - 2.0 * d.cwiseProduct(tc).sum() +
               (d * gram).cwiseProduct(d).sum() + beta * d.squaredNorm();
    }

    Matrix gradient(const Matrix& d) const {
        return 2.0 * (d * gram - tc) + 2.0 * beta * d;
    }
};

// One gradient step on a dictionary. Full-batch mode enforces descent of the
// step objective by halving, and throws StepDivergence when even the best
// retry overshoots by more than 10%.
void dict_gradient_step(Matrix& d, const QuadModel& model,
                        const TrainingConfig& cfg, double& persisted_step,
                        int outer_index, bool full_batch) {
    const Matrix grad = model.gradient(d);

    double step;
    if (cfg.dict_step > 0.0) {
        step = full_batch ? persisted_step
                          : cfg.dict_step / (1.0 + outer_index / 10.0);
    } else {
        // spectral auto step: 1/L for the quadratic, slightly deflated since
        // power iteration estimates the top eigenvalue from below
        const double lip = 2.0 * 1.02 * spectral_norm(model.gram) + 2.0 * model.beta;
        if (lip == 0.0) return;  // objective is constant in D
        step = 1.0 / lip;
    }

    if (!full_batch) {
        d -= step * grad;
        if (cfg.normalize_columns) project_columns_unit_ball(d);
        return;
    }

    const double old_value = model.value(d);
    const double slack = 1e-14 * std::max(1.0, std::abs(old_value));
    double best_value = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving <= 10; ++halving) {
        Matrix cand = d - step * grad;
        if (cfg.normalize_columns) project_columns_unit_ball(cand);
        const double v = model.value(cand);
        best_value = std::min(best_value, v);
        if (v <= old_value + slack) {
            d = cand;
            if (cfg.dict_step > 0.0) persisted_step = step;
            return;
        }
        step *= 0.5;
    }
    if (best_value > 1.1 * old_value + slack) {
        throw StepDivergence(
            "dictionary step diverged after 10 halvings (objective " +
            std::to_string(old_value) + " -> " + std::to_string(best_value) + ")");
    }
    // Residual increases are gradient noise near a stationary point; keeping
    // the current dictionary preserves monotonicity.
}

std::vector<Index> pick_batch(Index n, Index batch, Rng& rng) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    if (batch >= n) return idx;
    // partial Fisher-Yates: first `batch` entries become the sample
    for (Index i = 0; i < batch; ++i) {
        const auto j = i + static_cast<Index>(rng.below(
                               static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(batch));
    return idx;
}

}  // namespace

void TrainingSet::validate() const {
    require_dims(seen_features.cols() == seen_attributes.cols(),
                 "training set: feature count " +
                     std::to_string(seen_features.cols()) +
                     " != attribute count " +
                     std::to_string(seen_attributes.cols()));
    require_dims(seen_attributes.rows() == unseen_prototypes.rows(),
                 "training set: attribute dim " +
                     std::to_string(seen_attributes.rows()) +
                     " != prototype dim " +
                     std::to_string(unseen_prototypes.rows()));
    if (seen_features.cols() < 1) {
        throw InvalidArgument("training set: need at least one seen sample");
    }
    if (unseen_prototypes.cols() < 1) {
        throw InvalidArgument("training set: need at least one unseen prototype");
    }
    require_finite(seen_features, "seen_features");
    require_finite(seen_attributes, "seen_attributes");
    require_finite(unseen_prototypes, "unseen_prototypes");
}

void TrainingConfig::validate(Index sample_count) const {
    if (atom_count < 1) throw InvalidArgument("config: atom_count must be >= 1");
    if (sparsity < 0.0) throw InvalidArgument("config: sparsity must be >= 0");
    if (dict_penalty < 0.0) {
        throw InvalidArgument("config: dict_penalty must be >= 0");
    }
    if (outer_iterations < 0) {
        throw InvalidArgument("config: outer_iterations must be >= 0");
    }
    if (inner_alternations < 1) {
        throw InvalidArgument("config: inner_alternations must be >= 1");
    }
    if (batch_size < 0 || batch_size > sample_count) {
        throw InvalidArgument("config: batch_size must be in [0, sample count]");
    }
}

void CoupledDictionary::validate() const {
    require_dims(d_x.cols() == d_z.cols(),
                 "coupled dictionary: atom counts differ (" +
                     std::to_string(d_x.cols()) + " vs " +
                     std::to_string(d_z.cols()) + ")");
    require_finite(d_x, "d_x");
    require_finite(d_z, "d_z");
}

Matrix init_dictionary(Index rows, Index atoms, std::uint64_t seed) {
    if (rows < 1 || atoms < 1) {
        throw InvalidArgument("init_dictionary: rows and atoms must be >= 1");
    }
    Rng rng(seed);
    Matrix d(rows, atoms);
    for (Index j = 0; j < atoms; ++j) {
        for (Index i = 0; i < rows; ++i) {
            d(i, j) = rng.normal();
        }
    }
    for (Index j = 0; j < atoms; ++j) {
        const double n = d.col(j).norm();
        if (n > 1e-300) {
            d.col(j) /= n;
        } else {
            d.col(j).setZero();
            d(0, j) = 1.0;
        }
    }
    return d;
}

void update_visual_block(Matrix& d_x, const Matrix& x, Matrix& a,
                         const TrainingConfig& cfg, TrainerState& state) {
    const Index p = x.rows();
    const Index n = x.cols();
    const Index r = d_x.cols();
    require_dims(d_x.rows() == p, "visual block: d_x rows != feature dim");
    require_dims(a.rows() == r && a.cols() == n,
                 "visual block: codes must be atoms x samples");

    const Index batch = (cfg.batch_size <= 0 || cfg.batch_size >= n)
                            ? n
                            : cfg.batch_size;
    const bool full = batch == n;

    for (int round = 0; round < cfg.inner_alternations; ++round) {
        const auto idx = pick_batch(n, batch, state.rng);

        Matrix xb(p, batch), warm(r, batch);
        for (Index k = 0; k < batch; ++k) {
            xb.col(k) = x.col(idx[static_cast<std::size_t>(k)]);
            warm.col(k) = a.col(idx[static_cast<std::size_t>(k)]);
        }

        // per-sample LASSO with the per-sample share of the Eq-scale weights
        const auto sol = batch_lasso(d_x, xb, 1.0 / static_cast<double>(p),
                                     cfg.sparsity / static_cast<double>(r),
                                     cfg.lasso, &warm);
        state.lasso_converged = state.lasso_converged && sol.all_converged();
        for (Index k = 0; k < batch; ++k) {
            a.col(idx[static_cast<std::size_t>(k)]) = sol.codes.col(k);
        }

        QuadModel model;
        model.beta = cfg.dict_penalty;
        model.add_term(xb, sol.codes,
                       1.0 / static_cast<double>(batch * p));
        dict_gradient_step(d_x, model, cfg, state.step_x, state.outer_index,
                           full);
    }
}

void update_attribute_block(Matrix& d_z, const Matrix& z, const Matrix& zprime,
                            const Matrix& a, Matrix& b,
                            const TrainingConfig& cfg, TrainerState& state) {
    const Index q = z.rows();
    const Index n = z.cols();
    const Index m = zprime.cols();
    const Index r = d_z.cols();
    require_dims(d_z.rows() == q && zprime.rows() == q,
                 "attribute block: attribute dims differ");
    require_dims(a.rows() == r && a.cols() == n,
                 "attribute block: seen codes must be atoms x samples");
    require_dims(b.rows() == r && b.cols() == m,
                 "attribute block: unseen codes must be atoms x prototypes");

    const Index batch = (cfg.batch_size <= 0 || cfg.batch_size >= n)
                            ? n
                            : cfg.batch_size;
    const bool full = batch == n;

    for (int round = 0; round < cfg.inner_alternations; ++round) {
        const auto sol = batch_lasso(d_z, zprime, 1.0 / static_cast<double>(q),
                                     cfg.sparsity / static_cast<double>(r),
                                     cfg.lasso, &b);
        state.lasso_converged = state.lasso_converged && sol.all_converged();
        b = sol.codes;

        QuadModel model;
        model.beta = cfg.dict_penalty;
        if (full) {
            model.add_term(z, a, 1.0 / static_cast<double>(n * q));
        } else {
            const auto idx = pick_batch(n, batch, state.rng);
            Matrix zb(q, batch), ab(r, batch);
            for (Index k = 0; k < batch; ++k) {
                zb.col(k) = z.col(idx[static_cast<std::size_t>(k)]);
                ab.col(k) = a.col(idx[static_cast<std::size_t>(k)]);
            }
            model.add_term(zb, ab, 1.0 / static_cast<double>(batch * q));
        }
        model.add_term(zprime, b, 1.0 / static_cast<double>(m * q));
        dict_gradient_step(d_z, model, cfg, state.step_z, state.outer_index,
                           full);
    }
}

TraceEntry objective_terms(const Matrix& x, const Matrix& z,
                           const Matrix& zprime, const CoupledDictionary& dict,
                           const Matrix& a, const Matrix& b, double lambda) {
    const double n = static_cast<double>(x.cols());
    const double p = static_cast<double>(x.rows());
    const double q = static_cast<double>(z.rows());
    const double m = static_cast<double>(zprime.cols());
    const double r = static_cast<double>(a.rows());

    TraceEntry e;
    e.x_fidelity = (x - dict.d_x * a).squaredNorm() / (n * p);
    e.a_penalty = lambda * a.lpNorm<1>() / (n * r);
    e.z_fidelity = (z - dict.d_z * a).squaredNorm() / (n * q);
    e.zprime_fidelity = (zprime - dict.d_z * b).squaredNorm() / (m * q);
    e.b_penalty = lambda * b.lpNorm<1>() / (m * r);
    return e;
}

TrainingResult train_coupled(const TrainingSet& data,
                             const TrainingConfig& config) {
    data.validate();
    config.validate(data.seen_features.cols());

    Matrix x = data.seen_features;
    Matrix z = data.seen_attributes;
    Matrix zprime = data.unseen_prototypes;
    if (config.normalize_data) {
        normalize_columns_unit(x);
        normalize_columns_unit(z);
        normalize_columns_unit(zprime);
    }

    const Index p = x.rows();
    const Index q = z.rows();
    const Index n = x.cols();
    const Index m = zprime.cols();
    const Index r = config.atom_count;

    TrainingResult out;
    out.dictionary.d_x = init_dictionary(p, r, subseed(config.seed, 0));
    out.dictionary.d_z = init_dictionary(q, r, subseed(config.seed, 1));
    out.codes_seen = Matrix::Zero(r, n);
    out.codes_unseen = Matrix::Zero(r, m);
    out.trace.reserve(static_cast<std::size_t>(config.outer_iterations));

    TrainerState state;
    state.rng = Rng(subseed(config.seed, 2));
    state.step_x = config.dict_step;
    state.step_z = config.dict_step;

    for (int t = 0; t < config.outer_iterations; ++t) {
        state.outer_index = t;
        update_visual_block(out.dictionary.d_x, x, out.codes_seen, config,
                            state);
        update_attribute_block(out.dictionary.d_z, z, zprime, out.codes_seen,
                               out.codes_unseen, config, state);
        out.trace.push_back(objective_terms(x, z, zprime, out.dictionary,
                                            out.codes_seen, out.codes_unseen,
                                            config.sparsity));
        if (!config.checkpoint_dir.empty() && config.checkpoint_every > 0 &&
            (t + 1) % config.checkpoint_every == 0) {
            save_checkpoint(config.checkpoint_dir, out.dictionary, config);
        }
    }
    out.all_lasso_converged = state.lasso_converged;
    return out;
}

void save_checkpoint(const std::filesystem::path& dir,
                     const CoupledDictionary& dict, const TrainingConfig& cfg) {
    std::filesystem::create_directories(dir);
    write_matrix(dir / "d_x.cdzm", dict.d_x);
    write_matrix(dir / "d_z.cdzm", dict.d_z);
    std::ofstream meta(dir / "meta.txt", std::ios::trunc);
    if (!meta) {
        throw DataError("cannot write checkpoint meta: " +
                        (dir / "meta.txt").string());
    }
    char lam[40];
    std::snprintf(lam, sizeof(lam), "%.17g", cfg.sparsity);
    meta << "format = cdzsl-checkpoint\n"
         << "version = 1\n"
         << "lambda = " << lam << "\n"
         << "normalize_data = " << (cfg.normalize_data ? "true" : "false")
         << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    auto meta = KeyValueFile::parse_file(dir / "meta.txt");
    const std::string format = meta.need_string("format");
    if (format != "cdzsl-checkpoint") {
        throw DataError(dir.string() + ": not a checkpoint directory (format '" +
                        format + "')");
    }
    const auto version = meta.get_int("version", 1);
    if (version != 1) {
        throw DataError(dir.string() + ": unsupported checkpoint version " +
                        std::to_string(version));
    }
    Checkpoint ck;
    ck.lambda = meta.get_double("lambda", 0.1);
    ck.normalize_data = meta.get_bool("normalize_data", true);
    meta.reject_unknown();
    ck.dictionary.d_x = read_matrix(dir / "d_x.cdzm");
    ck.dictionary.d_z = read_matrix(dir / "d_z.cdzm");
    ck.dictionary.validate();
    return ck;
}

}  // namespace cdzsl
