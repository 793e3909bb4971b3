#include "voi/errors.hpp"
#include "voi/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace voi {

// SIMPLS for a single response. Each component's weight is the current
// (deflated) cross-product S = X0' y0; its score is normalized to unit length,
// and S is deflated by the orthonormalized x-loading so later scores stay
// orthogonal to earlier ones.
PlsFit simpls_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components) {
    if (x.rows() != y.size()) throw DataError("simpls_fit: x and y row counts differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError("simpls_fit: non-finite inputs");
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2 || p < 1) throw DataError("simpls_fit: need at least 2 rows and 1 column");
    const Eigen::Index max_c = std::min<Eigen::Index>(p, n - 1);
    if (n_components < 1 || n_components > max_c) {
        throw DomainError("simpls_fit: n_components = " + std::to_string(n_components) + " outside [1, " +
                          std::to_string(max_c) + "]");
    }

    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd x0 = x.rowwise() - x_mean;
    const Eigen::VectorXd y0 = y.array() - y_mean;
    if (!(y0.squaredNorm() > 0.0)) throw DataError("simpls_fit: response has zero variance");

    Eigen::MatrixXd weights(p, n_components);
    Eigen::MatrixXd scores(n, n_components);
    Eigen::MatrixXd basis(p, n_components);  // orthonormal x-loadings
    Eigen::VectorXd y_load(n_components);

    Eigen::VectorXd s = x0.transpose() * y0;
    const double s_scale = s.norm();
    int used = 0;
    for (int a = 0; a < n_components; ++a) {
        if (!(s.norm() > 1e-12 * s_scale)) break;  // response fully explained
        Eigen::VectorXd r = s;
        Eigen::VectorXd t = x0 * r;
        const double t_norm = t.norm();
        if (!(t_norm > 0.0)) break;
        t /= t_norm;
        r /= t_norm;
        const Eigen::VectorXd loading = x0.transpose() * t;
        Eigen::VectorXd v = loading;
        for (int pass = 0; pass < 2 && a > 0; ++pass) {
            v -= basis.leftCols(a) * (basis.leftCols(a).transpose() * v);
        }
        const double v_norm = v.norm();
        if (!(v_norm > 0.0)) break;
        v /= v_norm;
        s -= v * v.dot(s);

        weights.col(a) = r;
        scores.col(a) = t;
        basis.col(a) = v;
        y_load(a) = y0.dot(t);
        ++used;
    }
    if (used == 0) throw NumericalError("simpls_fit: no component could be extracted");

    PlsFit fit;
    PlsModel& m = fit.model;
    m.n_components = used;
    m.x_mean = x_mean.transpose();
    m.y_mean = y_mean;
    m.weight_matrix = weights.leftCols(used);
    m.y_loadings = y_load.head(used);
    m.regression_vector = m.weight_matrix * m.y_loadings;
    m.intercept = y_mean - x_mean.dot(m.regression_vector);
    fit.scores = scores.leftCols(used);
    fit.fitted = (fit.scores * m.y_loadings).array() + y_mean;
    return fit;
}

Eigen::MatrixXd pls_scores(const PlsModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.weight_matrix.rows()) throw DataError("pls_scores: column count mismatch");
    return (x.rowwise() - model.x_mean.transpose()) * model.weight_matrix;
}

}  // namespace voi
