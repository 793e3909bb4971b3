#include "voi/info.hpp"

#include "voi/errors.hpp"

#include <cmath>
#include <string>

namespace voi {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw DataError(std::string(what) + ": non-finite entries");
}

}  // namespace

CovMatrix sample_covariance(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw DataError("sample_covariance: need at least 2 rows");
    if (data.cols() < 1) throw DataError("sample_covariance: need at least 1 column");
    require_finite(data, "sample_covariance");
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::MatrixXd k = (centered.adjoint() * centered) / static_cast<double>(data.rows() - 1);
    // Exact symmetry; the product above can differ in the last bit across the diagonal.
    k = 0.5 * (k + k.transpose()).eval();
    return CovMatrix{std::move(k), static_cast<std::size_t>(data.rows())};
}

Eigen::MatrixXd shrink_covariance(const Eigen::MatrixXd& k, double shrinkage) {
    if (!(shrinkage >= 0.0 && shrinkage < 1.0)) {
        throw DomainError("shrinkage must lie in [0, 1), got " + std::to_string(shrinkage));
    }
    if (shrinkage == 0.0) return k;
    const double target = k.diagonal().mean();
    Eigen::MatrixXd out = (1.0 - shrinkage) * k;
    out.diagonal().array() += shrinkage * target;
    return out;
}

double logdet_psd(const Eigen::MatrixXd& k, double shrinkage) {
    if (k.rows() != k.cols() || k.rows() == 0) throw DomainError("logdet_psd: matrix must be square and nonempty");
    Eigen::MatrixXd a = shrink_covariance(k, shrinkage);
    const Eigen::Index n = a.rows();
    // In-place lower Cholesky; keeps the pivot index for diagnostics.
    double logdet = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j) - a.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NotPositiveDefinite(static_cast<std::size_t>(j), pivot);
        }
        const double l_jj = std::sqrt(pivot);
        a(j, j) = l_jj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / l_jj;
        }
        logdet += std::log(pivot);
    }
    return logdet;
}

double logdet_psd(const CovMatrix& k, double shrinkage) {
    return logdet_psd(k.entries, shrinkage);
}

MIEstimate gaussian_mi(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x, double shrinkage) {
    if (z.rows() != x.rows()) throw DataError("gaussian_mi: predictor and response row counts differ");
    if (x.cols() != 1) throw DataError("gaussian_mi: response must be a single column");
    if (z.cols() < 1) throw DataError("gaussian_mi: no predictor columns");

    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols();
    Eigen::MatrixXd joint_data(n, p + 1);
    joint_data << z, x;
    const CovMatrix joint = sample_covariance(joint_data);
    if (!(joint.entries(p, p) > 0.0)) throw DataError("gaussian_mi: response has zero variance");

    const Eigen::MatrixXd shrunk = shrink_covariance(joint.entries, shrinkage);
    const double ld_z = logdet_psd(Eigen::MatrixXd(shrunk.topLeftCorner(p, p)));
    const double ld_x = std::log(shrunk(p, p));
    const double ld_joint = logdet_psd(shrunk);

    MIEstimate out;
    out.raw_nats = 0.5 * (ld_z + ld_x - ld_joint);
    if (!std::isfinite(out.raw_nats)) throw NumericalError("gaussian_mi: non-finite estimate");
    if (out.raw_nats < -1e-9) {
        throw NumericalError("gaussian_mi: negative estimate " + std::to_string(out.raw_nats) +
                             " beyond round-off tolerance");
    }
    out.nats = std::max(0.0, out.raw_nats);
    out.bits = nats_to_bits(out.nats);
    out.shrinkage = shrinkage;
    out.predictor_dim = static_cast<std::size_t>(p);
    out.response_dim = 1;
    out.n_samples = static_cast<std::size_t>(n);
    out.low_sample_warning = n < p + 2;
    return out;
}

EntropyNats gaussian_entropy_from_sample(std::span<const double> x) {
    if (x.size() < 2) throw DataError("gaussian_entropy_from_sample: need at least 2 values");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    if (!v.allFinite()) throw DataError("gaussian_entropy_from_sample: non-finite values");
    const double var = (v.array() - v.mean()).square().sum() / static_cast<double>(x.size() - 1);
    if (!(var > 0.0)) throw DataError("gaussian_entropy_from_sample: zero variance");
    return gaussian_entropy(std::sqrt(var));
}

AcfSeries acf(std::span<const double> series, std::size_t max_lag) {
    if (max_lag < 1) throw DomainError("acf: max_lag must be >= 1");
    if (series.size() <= max_lag + 1) {
        throw DataError("acf: series of length " + std::to_string(series.size()) + " too short for max_lag " +
                        std::to_string(max_lag));
    }
    const std::size_t n = series.size();
    double mean = 0.0;
    for (const double v : series) {
        if (!std::isfinite(v)) throw DataError("acf: non-finite values");
        mean += v;
    }
    mean /= static_cast<double>(n);

    double c0 = 0.0;
    for (const double v : series) c0 += (v - mean) * (v - mean);
    if (!(c0 > 0.0)) throw DataError("acf: zero variance series");

    AcfSeries out;
    out.values.resize(max_lag + 1);
    out.values[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double ck = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) ck += (series[t] - mean) * (series[t + lag] - mean);
        out.values[lag] = ck / c0;
    }
    return out;
}

}  // namespace voi
