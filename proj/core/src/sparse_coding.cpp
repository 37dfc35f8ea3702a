#include "cdzsl/sparse_coding.hpp"

#include <algorithm>
#include <cmath>

#include "cdzsl/errors.hpp"
#include "cdzsl/parallel.hpp"
#include "cdzsl/rng.hpp"

namespace cdzsl {

namespace {

constexpr double kObjectiveFloor = 1e-300;

// Power iteration underestimates the top singular value; a small inflation
// keeps the fixed step 1/L on the descent side.
constexpr double kSpectralMargin = 1.01;

double smooth_value(const LassoProblem& p, const Vector& code) {
    return p.data_weight * (p.target - p.dictionary * code).squaredNorm();
}

Vector smooth_gradient(const LassoProblem& p, const Vector& code) {
    return 2.0 * p.data_weight *
           (p.dictionary.transpose() * (p.dictionary * code - p.target));
}

}  // namespace

void LassoProblem::validate() const {
    require_dims(target.size() == dictionary.rows(),
                 "lasso: target length " + std::to_string(target.size()) +
                     " != dictionary row count " +
                     std::to_string(dictionary.rows()));
    if (sparsity_weight < 0.0) {
        throw InvalidArgument("lasso: sparsity_weight must be >= 0");
    }
    if (!(data_weight > 0.0)) {
        throw InvalidArgument("lasso: data_weight must be > 0");
    }
}

bool BatchLassoResult::all_converged() const {
    return std::all_of(converged.begin(), converged.end(),
                       [](std::uint8_t c) { return c != 0; });
}

double soft_threshold_scalar(double v, double t) {
    const double m = std::abs(v) - t;
    return m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
}

Vector soft_threshold(const Vector& v, double t) {
    if (t < 0.0) throw InvalidArgument("soft_threshold: t must be >= 0");
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        out[i] = soft_threshold_scalar(v[i], t);
    }
    return out;
}

double spectral_norm(const Matrix& m, int iterations) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Rng rng(0x5EEDCAFEF00DULL);  // fixed stream so the bound is reproducible
    Vector v(m.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    double n = v.norm();
    if (n == 0.0) return 0.0;
    v /= n;
    for (int it = 0; it < iterations; ++it) {
        Vector w = m.transpose() * (m * v);
        n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
    }
    return (m * v).norm();
}

double lasso_objective(const LassoProblem& problem, const Vector& code) {
    return smooth_value(problem, code) +
           problem.sparsity_weight * code.lpNorm<1>();
}

namespace detail {

LassoResult solve_with_spectral_bound(const LassoProblem& problem,
                                      double sigma_max,
                                      const SolverOptions& opts,
                                      const Vector& warm_start) {
    problem.validate();
    const Index r = problem.dictionary.cols();
    require_dims(warm_start.size() == r,
                 "lasso: warm start length " +
                     std::to_string(warm_start.size()) +
                     " != dictionary column count " + std::to_string(r));
    if (opts.max_iterations < 1) {
        throw InvalidArgument("lasso: max_iterations must be >= 1");
    }
    if (opts.tolerance < 0.0) {
        throw InvalidArgument("lasso: tolerance must be >= 0");
    }

    LassoResult res;
    res.code = warm_start;
    // Zero dictionary columns cannot reduce the fidelity term; pin them.
    for (Index j = 0; j < r; ++j) {
        if (problem.dictionary.col(j).squaredNorm() == 0.0) res.code[j] = 0.0;
    }

    const double lambda = problem.sparsity_weight;
    double obj = lasso_objective(problem, res.code);
    if (opts.record_trace) res.trace.push_back(obj);

    if (sigma_max == 0.0) {  // all-zero dictionary: fidelity is constant
        res.objective = obj;
        return res;
    }

    const double lipschitz = 2.0 * problem.data_weight * kSpectralMargin *
                             kSpectralMargin * sigma_max * sigma_max;
    double step = 1.0 / lipschitz;

    // One proximal step from `point`; with backtracking, shrinks `step`
    // until the quadratic model at `point` majorizes the smooth part.
    auto prox_step = [&](const Vector& point, double g_point) {
        const Vector grad = smooth_gradient(problem, point);
        for (int halvings = 0;; ++halvings) {
            Vector cand = soft_threshold(point - step * grad, step * lambda);
            if (opts.step_rule == StepRule::FixedSpectral) return cand;
            const Vector diff = cand - point;
            const double model = g_point + grad.dot(diff) +
                                 diff.squaredNorm() / (2.0 * step) +
                                 1e-15 * std::max(1.0, std::abs(g_point));
            if (smooth_value(problem, cand) <= model || halvings >= 60) {
                step *= 1.2;  // recover from overly cautious phases
                return cand;
            }
            step *= 0.5;
        }
    };

    if (!opts.acceleration) {
        Vector a = res.code;
        for (int k = 1; k <= opts.max_iterations; ++k) {
            res.iterations = k;
            const Vector cand = prox_step(a, smooth_value(problem, a));
            const double next = lasso_objective(problem, cand);
            if (next > obj) {  // only rounding noise left; keep best iterate
                if (opts.record_trace) res.trace.push_back(obj);
                res.objective = obj;
                return res;
            }
            const double prev = obj;
            a = cand;
            obj = next;
            res.code = a;
            if (opts.record_trace) res.trace.push_back(obj);
            if (prev - obj <= opts.tolerance * std::max(prev, kObjectiveFloor)) {
                res.objective = obj;
                return res;
            }
        }
        res.objective = obj;
        res.converged = false;
        return res;
    }

    // Momentum-accelerated proximal gradient with monotone acceptance: an
    // overshooting momentum step is discarded and the iteration restarts
    // from the best iterate.
    Vector x = res.code;
    Vector x_prev = x;
    Vector y = x;
    double t = 1.0;
    for (int k = 1; k <= opts.max_iterations; ++k) {
        Vector z = prox_step(y, smooth_value(problem, y));
        double obj_z = lasso_objective(problem, z);
        if (obj_z > obj) {
            y = x;
            t = 1.0;
            z = prox_step(y, smooth_value(problem, y));
            obj_z = lasso_objective(problem, z);
            if (obj_z > obj) {  // only rounding noise left
                z = x;
                obj_z = obj;
            }
        }
        x_prev = x;
        x = z;
        const double prev = obj;
        obj = obj_z;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = x + ((t - 1.0) / t_next) * (x - x_prev);
        t = t_next;
        res.code = x;
        res.iterations = k;
        if (opts.record_trace) res.trace.push_back(obj);
        if (prev - obj <= opts.tolerance * std::max(prev, kObjectiveFloor)) {
            res.objective = obj;
            return res;
        }
    }
    res.objective = obj;
    res.converged = false;
    return res;
}

}  // namespace detail

LassoResult lasso_solve(const LassoProblem& problem, const SolverOptions& opts,
                        const std::optional<Vector>& warm_start) {
    problem.validate();
    const Vector warm = warm_start.value_or(Vector::Zero(problem.dictionary.cols()));
    const double sigma = spectral_norm(problem.dictionary);
    return detail::solve_with_spectral_bound(problem, sigma, opts, warm);
}

Vector cd_lasso_oracle(const LassoProblem& problem) {
    problem.validate();
    const Index r = problem.dictionary.cols();
    const double threshold =
        problem.sparsity_weight / (2.0 * problem.data_weight);

    Vector col_sq(r);
    for (Index j = 0; j < r; ++j) {
        col_sq[j] = problem.dictionary.col(j).squaredNorm();
    }

    Vector a = Vector::Zero(r);
    Vector residual = problem.target;
    constexpr int kMaxSweeps = 200000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < r; ++j) {
            if (col_sq[j] == 0.0) continue;
            const double rho =
                problem.dictionary.col(j).dot(residual) + col_sq[j] * a[j];
            const double mag = std::abs(rho) - threshold;
            const double next =
                mag > 0.0 ? (rho > 0.0 ? mag : -mag) / col_sq[j] : 0.0;
            const double delta = next - a[j];
            if (delta != 0.0) {
                residual -= problem.dictionary.col(j) * delta;
                a[j] = next;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < 1e-10) break;
    }
    return a;
}

BatchLassoResult batch_lasso(const Matrix& dictionary, const Matrix& targets,
                             double data_weight, double sparsity_weight,
                             const SolverOptions& opts,
                             const Matrix* warm_start) {
    require_dims(targets.rows() == dictionary.rows(),
                 "batch_lasso: target rows " + std::to_string(targets.rows()) +
                     " != dictionary rows " + std::to_string(dictionary.rows()));
    const Index r = dictionary.cols();
    const Index n = targets.cols();
    if (warm_start) {
        require_dims(warm_start->rows() == r && warm_start->cols() == n,
                     "batch_lasso: warm start must be atoms x targets");
    }

    BatchLassoResult out;
    out.codes.resize(r, n);
    out.objectives.resize(n);
    out.iterations.assign(static_cast<std::size_t>(n), 0);
    out.converged.assign(static_cast<std::size_t>(n), 1);

    // One spectral bound per dictionary; every column then follows the exact
    // same floating-point path as a standalone lasso_solve would.
    const double sigma = spectral_norm(dictionary);

    parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t jz) {
        const Index j = static_cast<Index>(jz);
        const LassoProblem p{dictionary, targets.col(j), sparsity_weight,
                             data_weight};
        const Vector warm =
            warm_start ? Vector(warm_start->col(j)) : Vector(Vector::Zero(r));
        LassoResult res = detail::solve_with_spectral_bound(p, sigma, opts, warm);
        out.codes.col(j) = res.code;
        out.objectives[j] = res.objective;
        out.iterations[jz] = res.iterations;
        out.converged[jz] = res.converged ? 1 : 0;
    });
    return out;
}

OptimalityCheck check_optimality(const LassoProblem& problem,
                                 const Vector& code, double rel_tol) {
    problem.validate();
    require_dims(code.size() == problem.dictionary.cols(),
                 "check_optimality: code length mismatch");
    const Vector grad = smooth_gradient(problem, code);
    const double lambda = problem.sparsity_weight;
    OptimalityCheck chk;
    for (Index i = 0; i < code.size(); ++i) {
        if (code[i] != 0.0) {
            const double v = std::abs(grad[i] + lambda * (code[i] > 0 ? 1.0 : -1.0));
            chk.worst_nonzero = std::max(chk.worst_nonzero, v);
        } else {
            chk.worst_zero = std::max(chk.worst_zero, std::abs(grad[i]));
        }
    }
    chk.ok = chk.worst_nonzero <= rel_tol * lambda &&
             chk.worst_zero <= lambda * (1.0 + rel_tol);
    return chk;
}

}  // namespace cdzsl
