#include "cdzsl/matrix.hpp"

#include "cdzsl/errors.hpp"

namespace cdzsl {

void require_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) {
        throw NonFiniteValue(what + " contains a NaN or infinite entry");
    }
}

void require_finite(const Vector& v, const std::string& what) {
    if (!v.allFinite()) {
        throw NonFiniteValue(what + " contains a NaN or infinite entry");
    }
}

void require_dims(bool cond, const std::string& msg) {
    if (!cond) throw DimensionMismatch(msg);
}

void normalize_columns_unit(Matrix& m, double tiny) {
    for (Index j = 0; j < m.cols(); ++j) {
        const double n = m.col(j).norm();
        if (n > tiny) m.col(j) /= n;
    }
}

void project_columns_unit_ball(Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        const double n = m.col(j).norm();
        if (n > 1.0) m.col(j) /= n;
    }
}

}  // namespace cdzsl
