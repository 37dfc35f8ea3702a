#pragma once

#include <Eigen/Dense>
#include <string>

namespace cdzsl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws NonFiniteValue naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const std::string& what);
void require_finite(const Vector& v, const std::string& what);

/// Throws DimensionMismatch with a formatted message unless `cond` holds.
void require_dims(bool cond, const std::string& msg);

/// Rescales every column to unit l2 norm. Columns with norm below `tiny`
/// are left untouched.
void normalize_columns_unit(Matrix& m, double tiny = 1e-300);

/// Projects every column onto the unit l2 ball (norm > 1 shrinks to 1).
void project_columns_unit_ball(Matrix& m);

}  // namespace cdzsl
