#include "voi/errors.hpp"
#include "voi/models.hpp"

#include <cmath>
#include <string>

namespace voi {

namespace {

void check_design(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const char* who) {
    if (x.rows() != y.size()) throw DataError(std::string(who) + ": x and y row counts differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError(std::string(who) + ": non-finite inputs");
}

void check_columns(Eigen::Index expected, const Eigen::MatrixXd& x, const char* who) {
    if (x.cols() != expected) {
        throw DataError(std::string(who) + ": expected " + std::to_string(expected) + " columns, got " +
                        std::to_string(x.cols()));
    }
}

}  // namespace

LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    check_design(x, y, "ols_fit");
    if (x.rows() < 2) throw DataError("ols_fit: need at least 2 rows");

    // Centering absorbs the intercept; the complete orthogonal decomposition
    // yields the minimum-norm slope vector when the centered design is singular.
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    LinearModel model;
    if (x.cols() == 0) {
        model.intercept = y_mean;
        model.coefficients.resize(0);
        return model;
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    model.rank = cod.rank();
    model.rank_deficient = model.rank < x.cols();
    model.coefficients = cod.solve(yc);
    model.intercept = y_mean - x_mean.dot(model.coefficients);
    if (!model.coefficients.allFinite() || !std::isfinite(model.intercept)) {
        throw NumericalError("ols_fit: non-finite solution");
    }
    return model;
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& x) {
    check_columns(model.coefficients.size(), x, "predict(LM)");
    Eigen::VectorXd out = x * model.coefficients;
    out.array() += model.intercept;
    return out;
}

Eigen::VectorXd predict(const PlsModel& model, const Eigen::MatrixXd& x) {
    check_columns(model.regression_vector.size(), x, "predict(PLS)");
    Eigen::VectorXd out = x * model.regression_vector;
    out.array() += model.intercept;
    return out;
}

Eigen::VectorXd predict(const ForecastModel& model, const Eigen::MatrixXd& x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

Eigen::Index input_dim(const ForecastModel& model) {
    struct Visitor {
        Eigen::Index operator()(const LinearModel& m) const { return m.coefficients.size(); }
        Eigen::Index operator()(const PlsModel& m) const { return m.regression_vector.size(); }
        Eigen::Index operator()(const NeuralNet& m) const { return m.input_dim(); }
    };
    return std::visit(Visitor{}, model);
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LM: return "LM";
        case ModelKind::PLS: return "PLS";
        case ModelKind::NN: return "NN";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "LM") return ModelKind::LM;
    if (name == "PLS") return ModelKind::PLS;
    if (name == "NN") return ModelKind::NN;
    throw ConfigError("unknown model kind '" + name + "' (expected LM, PLS or NN)");
}

}  // namespace voi
