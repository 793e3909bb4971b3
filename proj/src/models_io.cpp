#include "voi/errors.hpp"
#include "voi/models.hpp"

#include <string>

namespace voi {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Eigen::VectorXd r = m.row(i).transpose();
        rows.push_back(vec_to_json(r));
    }
    return rows;
}

Eigen::VectorXd vec_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const auto r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = rows.empty() ? cols_if_empty : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) {
            throw DataError("model JSON: ragged matrix");
        }
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return m;
}

struct ToJson {
    json operator()(const LinearModel& m) const {
        return {{"schema_version", kModelSchemaVersion},
                {"kind", "LM"},
                {"intercept", m.intercept},
                {"coefficients", vec_to_json(m.coefficients)},
                {"rank_deficient", m.rank_deficient},
                {"rank", m.rank}};
    }
    json operator()(const PlsModel& m) const {
        return {{"schema_version", kModelSchemaVersion},
                {"kind", "PLS"},
                {"n_components", m.n_components},
                {"x_mean", vec_to_json(m.x_mean)},
                {"y_mean", m.y_mean},
                {"weight_matrix", mat_to_json(m.weight_matrix)},
                {"y_loadings", vec_to_json(m.y_loadings)},
                {"regression_vector", vec_to_json(m.regression_vector)},
                {"intercept", m.intercept}};
    }
    json operator()(const NeuralNet& m) const {
        return {{"schema_version", kModelSchemaVersion},
                {"kind", "NN"},
                {"input_dim", m.input_dim()},
                {"hidden_dim", m.hidden_dim()},
                {"hidden_weights", mat_to_json(m.hidden_weights)},
                {"hidden_bias", vec_to_json(m.hidden_bias)},
                {"output_weights", vec_to_json(m.output_weights)},
                {"output_bias", m.output_bias},
                {"x_mean", vec_to_json(m.x_mean)},
                {"x_scale", vec_to_json(m.x_scale)},
                {"y_mean", m.y_mean},
                {"y_scale", m.y_scale},
                {"seed", m.seed}};
    }
};

}  // namespace

nlohmann::json model_to_json(const ForecastModel& model) {
    return std::visit(ToJson{}, model);
}

ForecastModel model_from_json(const nlohmann::json& doc) {
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != kModelSchemaVersion) {
            throw DataError("model JSON: unsupported schema_version " + std::to_string(version));
        }
        const auto kind = model_kind_from_string(doc.at("kind").get<std::string>());
        switch (kind) {
            case ModelKind::LM: {
                LinearModel m;
                m.intercept = doc.at("intercept").get<double>();
                m.coefficients = vec_from_json(doc.at("coefficients"));
                m.rank_deficient = doc.value("rank_deficient", false);
                m.rank = doc.value("rank", Eigen::Index{0});
                return m;
            }
            case ModelKind::PLS: {
                PlsModel m;
                m.n_components = doc.at("n_components").get<int>();
                m.x_mean = vec_from_json(doc.at("x_mean"));
                m.y_mean = doc.at("y_mean").get<double>();
                m.weight_matrix = mat_from_json(doc.at("weight_matrix"), m.n_components);
                m.y_loadings = vec_from_json(doc.at("y_loadings"));
                m.regression_vector = vec_from_json(doc.at("regression_vector"));
                m.intercept = doc.at("intercept").get<double>();
                return m;
            }
            case ModelKind::NN: {
                NeuralNet m;
                const auto p = doc.at("input_dim").get<Eigen::Index>();
                m.hidden_weights = mat_from_json(doc.at("hidden_weights"), p);
                m.hidden_bias = vec_from_json(doc.at("hidden_bias"));
                m.output_weights = vec_from_json(doc.at("output_weights"));
                m.output_bias = doc.at("output_bias").get<double>();
                m.x_mean = vec_from_json(doc.at("x_mean"));
                m.x_scale = vec_from_json(doc.at("x_scale"));
                m.y_mean = doc.at("y_mean").get<double>();
                m.y_scale = doc.at("y_scale").get<double>();
                m.seed = doc.at("seed").get<std::uint64_t>();
                if (m.hidden_weights.cols() != p || m.x_mean.size() != p || m.x_scale.size() != p) {
                    throw DataError("model JSON: NN input dimensions disagree");
                }
                return m;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("model JSON: ") + e.what());
    }
    throw DataError("model JSON: unreachable");
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"epochs", c.epochs},
            {"hidden_units", c.hidden_units},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc, TrainConfig c) {
    c.epochs = doc.value("epochs", c.epochs);
    c.hidden_units = doc.value("hidden_units", c.hidden_units);
    c.learning_rate = doc.value("learning_rate", c.learning_rate);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.seed = doc.value("seed", c.seed);
    return c;
}

}  // namespace voi
