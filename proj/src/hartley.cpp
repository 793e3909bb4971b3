#include "voi/core.hpp"

#include "voi/errors.hpp"
#include "voi/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace voi {

namespace {

// Row-major N x d view of the sample.
struct Points {
    std::vector<double> data;
    std::size_t n = 0;
    std::size_t dim = 0;

    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

struct LloydResult {
    double objective = std::numeric_limits<double>::infinity();
    double std_error = 0.0;
    int iterations = 0;
    std::vector<double> centroids;  // k x dim, row-major
};

class Lloyd {
public:
    Lloyd(const Points& pts, std::size_t k) : pts_(pts), k_(k), assign_(pts.n), dist_(pts.n) {}

    LloydResult run(std::uint64_t restart_seed, const HartleyConfig& config) {
        std::vector<double> centroids = initial_centroids(restart_seed);
        LloydResult out;
        double previous = std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < config.max_iterations; ++it) {
            const double obj = assign(centroids);
            const bool converged = std::isfinite(previous) && previous - obj <= config.relative_tolerance * previous;
            update(centroids);
            previous = obj;
            if (converged) break;
        }
        // Score the final partition against its own cell means.
        assign(centroids);
        update(centroids);
        out.objective = within_cell_objective(centroids, out.std_error);
        out.iterations = it;
        out.centroids = std::move(centroids);
        return out;
    }

private:
    std::vector<double> initial_centroids(std::uint64_t restart_seed) const {
        Rng rng(restart_seed);
        std::vector<std::size_t> idx(pts_.n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Partial Fisher-Yates: first k entries become a uniform k-subset.
        for (std::size_t i = 0; i < k_; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pts_.n - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<double> c(k_ * pts_.dim);
        for (std::size_t c_i = 0; c_i < k_; ++c_i) {
            const auto r = pts_.row(idx[c_i]);
            std::copy(r.begin(), r.end(), c.begin() + static_cast<std::ptrdiff_t>(c_i * pts_.dim));
        }
        return c;
    }

    // Nearest-centroid assignment; ties go to the lower index. Returns the
    // mean squared distance.
    double assign(const std::vector<double>& centroids) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts_.n; ++i) {
            const auto p = pts_.row(i);
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k_; ++c) {
                const double d = squared_distance(p, {centroids.data() + c * pts_.dim, pts_.dim});
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assign_[i] = best_c;
            dist_[i] = best;
            total += best;
        }
        return total / static_cast<double>(pts_.n);
    }

    void update(std::vector<double>& centroids) {
        const std::size_t dim = pts_.dim;
        std::vector<double> sums(k_ * dim, 0.0);
        std::vector<std::size_t> counts(k_, 0);
        for (std::size_t i = 0; i < pts_.n; ++i) {
            const auto p = pts_.row(i);
            const std::size_t c = assign_[i];
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += p[j];
        }
        std::vector<bool> taken(pts_.n, false);
        for (std::size_t c = 0; c < k_; ++c) {
            if (counts[c] > 0) {
                for (std::size_t j = 0; j < dim; ++j) {
                    centroids[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);
                }
                continue;
            }
            // Empty cell: move it onto the point farthest from its centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < pts_.n; ++i) {
                if (!taken[i] && dist_[i] > far_d) {
                    far_d = dist_[i];
                    far = i;
                }
            }
            taken[far] = true;
            const auto p = pts_.row(far);
            std::copy(p.begin(), p.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
        }
    }

    double within_cell_objective(const std::vector<double>& centroids, double& std_error) const {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < pts_.n; ++i) {
            const double d = squared_distance(pts_.row(i), {centroids.data() + assign_[i] * pts_.dim, pts_.dim});
            sum += d;
            sum_sq += d * d;
        }
        const auto n = static_cast<double>(pts_.n);
        const double mean = sum / n;
        const double var = pts_.n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        std_error = std::sqrt(var / n);
        return mean;
    }

    const Points& pts_;
    std::size_t k_;
    std::vector<std::size_t> assign_;
    std::vector<double> dist_;
};

HartleyEstimate estimate(const Points& pts, std::size_t k, int restarts, std::uint64_t seed,
                         const HartleyConfig& config) {
    if (pts.n == 0) throw DataError("hartley_value_estimate: empty sample");
    if (k < 1) throw DomainError("hartley_value_estimate: k must be >= 1");
    if (k > pts.n) {
        throw DomainError("hartley_value_estimate: k = " + std::to_string(k) + " exceeds sample count " +
                          std::to_string(pts.n));
    }
    if (restarts < 1) throw DomainError("hartley_value_estimate: restarts must be >= 1");

    Lloyd lloyd(pts, k);
    LloydResult best;
    int best_restart = -1;
    for (int r = 0; r < restarts; ++r) {
        LloydResult res = lloyd.run(derive_seed(seed, static_cast<std::uint64_t>(r)), config);
        // Strict comparison keeps the lowest restart index among equal objectives.
        if (best_restart < 0 || res.objective < best.objective) {
            best = std::move(res);
            best_restart = r;
        }
    }

    HartleyEstimate out;
    out.k = k;
    out.info_nats = std::log(static_cast<double>(k));
    out.u_value = -0.5 * best.objective;
    out.std_error = 0.5 * best.std_error;
    out.restarts = restarts;
    out.seed = seed;
    out.best_restart = best_restart;
    out.iterations = best.iterations;
    out.centroids.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        out.centroids[c].assign(best.centroids.begin() + static_cast<std::ptrdiff_t>(c * pts.dim),
                                best.centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * pts.dim));
    }
    return out;
}

}  // namespace

HartleyEstimate hartley_value_estimate(const std::vector<std::vector<double>>& samples, std::size_t k,
                                       int restarts, std::uint64_t seed, const HartleyConfig& config) {
    Points pts;
    pts.n = samples.size();
    pts.dim = samples.empty() ? 0 : samples.front().size();
    if (pts.n > 0 && pts.dim == 0) throw DataError("hartley_value_estimate: zero-dimensional samples");
    pts.data.reserve(pts.n * pts.dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != pts.dim) {
            throw DataError("hartley_value_estimate: sample " + std::to_string(i) + " has inconsistent dimension");
        }
        for (const double v : samples[i]) {
            if (!std::isfinite(v)) throw DataError("hartley_value_estimate: non-finite sample value");
            pts.data.push_back(v);
        }
    }
    return estimate(pts, k, restarts, seed, config);
}

HartleyEstimate hartley_value_estimate(std::span<const double> samples, std::size_t k, int restarts,
                                       std::uint64_t seed, const HartleyConfig& config) {
    Points pts;
    pts.n = samples.size();
    pts.dim = 1;
    pts.data.assign(samples.begin(), samples.end());
    for (const double v : pts.data) {
        if (!std::isfinite(v)) throw DataError("hartley_value_estimate: non-finite sample value");
    }
    return estimate(pts, k, restarts, seed, config);
}

}  // namespace voi
