#include "voi/synth.hpp"

#include "voi/backtest.hpp"
#include "voi/errors.hpp"
#include "voi/rng.hpp"

#include <cmath>
#include <sstream>

namespace voi {

namespace {

const std::vector<std::string> kPanelLabels{"BTC/USD", "ETH/USD", "DAI/BTC", "XRP/BTC", "IOT/BTC"};

Date start_date() { return Date{std::chrono::year{2019}, std::chrono::January, std::chrono::day{1}}; }

PriceSeries integrate(const std::string& symbol, const std::vector<double>& returns, double start_price) {
    PriceSeries s;
    s.symbol = symbol;
    std::chrono::sys_days day{start_date()};
    double log_price = std::log(start_price);
    s.dates.push_back(Date{day});
    s.close.push_back(start_price);
    for (const double r : returns) {
        day += std::chrono::days{1};
        log_price += r;
        s.dates.push_back(Date{day});
        s.close.push_back(std::exp(log_price));
    }
    return s;
}

}  // namespace

std::string to_string(SynthKind kind) {
    return kind == SynthKind::GaussianChannel ? "gaussian_channel" : "ar1_panel";
}

SynthKind synth_kind_from_string(const std::string& name) {
    if (name == "gaussian_channel") return SynthKind::GaussianChannel;
    if (name == "ar1_panel") return SynthKind::Ar1Panel;
    throw ConfigError("unknown synth kind '" + name + "' (expected gaussian_channel or ar1_panel)");
}

void validate(const SynthSpec& spec) {
    if (spec.length < 2) throw ConfigError("synth: length must be >= 2");
    if (!(spec.noise_scale > 0.0) || !std::isfinite(spec.noise_scale)) throw ConfigError("synth: noise scale must be positive");
    if (!(spec.start_price > 0.0) || !std::isfinite(spec.start_price)) throw ConfigError("synth: start price must be positive");
    if (spec.kind == SynthKind::GaussianChannel && !(spec.rho > -1.0 && spec.rho < 1.0)) {
        throw ConfigError("synth: rho must lie in (-1, 1)");
    }
    if (spec.kind == SynthKind::Ar1Panel) {
        if (!(spec.phi > -1.0 && spec.phi < 1.0)) throw ConfigError("synth: phi must lie in (-1, 1)");
        if (spec.symbols < 1) throw ConfigError("synth: need at least one symbol");
    }
}

std::vector<std::string> synth_symbols(const SynthSpec& spec) {
    if (spec.kind == SynthKind::GaussianChannel) return {"TARGET", "SIGNAL"};
    std::vector<std::string> out;
    for (std::size_t j = 0; j < spec.symbols; ++j) {
        out.push_back(j < kPanelLabels.size() ? kPanelLabels[j] : "SYM" + std::to_string(j + 1));
    }
    return out;
}

std::vector<PriceSeries> synthesize(const SynthSpec& spec) {
    validate(spec);
    const std::size_t n_returns = spec.length - 1;
    const auto names = synth_symbols(spec);
    std::vector<PriceSeries> out;

    if (spec.kind == SynthKind::GaussianChannel) {
        Rng signal_rng(derive_seed(spec.seed, 0));
        Rng noise_rng(derive_seed(spec.seed, 1));
        const double rest = std::sqrt(1.0 - spec.rho * spec.rho);
        std::vector<double> target(n_returns);
        std::vector<double> signal(n_returns);
        double previous = signal_rng.normal();  // signal value before the first day
        for (std::size_t t = 0; t < n_returns; ++t) {
            target[t] = spec.noise_scale * (spec.rho * previous + rest * noise_rng.normal());
            previous = signal_rng.normal();
            signal[t] = spec.noise_scale * previous;
        }
        out.push_back(integrate(names[0], target, spec.start_price));
        out.push_back(integrate(names[1], signal, spec.start_price));
        return out;
    }

    const double stationary_sd = spec.noise_scale / std::sqrt(1.0 - spec.phi * spec.phi);
    for (std::size_t j = 0; j < spec.symbols; ++j) {
        Rng rng(derive_seed(spec.seed, j));
        std::vector<double> r(n_returns);
        double prev = stationary_sd * rng.normal();
        for (std::size_t t = 0; t < n_returns; ++t) {
            prev = spec.phi * prev + spec.noise_scale * rng.normal();
            r[t] = prev;
        }
        out.push_back(integrate(names[j], r, spec.start_price));
    }
    return out;
}

double synth_population_mi(const SynthSpec& spec) {
    const double c = spec.kind == SynthKind::GaussianChannel ? spec.rho : spec.phi;
    return -0.5 * std::log1p(-c * c);
}

double synth_response_sigma(const SynthSpec& spec) {
    if (spec.kind == SynthKind::GaussianChannel) return spec.noise_scale;
    return spec.noise_scale / std::sqrt(1.0 - spec.phi * spec.phi);
}

std::string prices_to_csv(const std::vector<PriceSeries>& series) {
    std::ostringstream out;
    out << "date,symbol,close\n";
    std::size_t len = 0;
    for (const auto& s : series) len = std::max(len, s.dates.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (const auto& s : series) {
            if (t < s.dates.size()) out << format_date(s.dates[t]) << ',' << s.symbol << ',' << format_number(s.close[t]) << '\n';
        }
    }
    return out.str();
}

nlohmann::json to_json(const SynthSpec& spec) {
    nlohmann::json j{{"kind", to_string(spec.kind)},
                     {"length", spec.length},
                     {"noise_scale", spec.noise_scale},
                     {"seed", spec.seed},
                     {"start_price", spec.start_price}};
    if (spec.kind == SynthKind::GaussianChannel) {
        j["rho"] = spec.rho;
    } else {
        j["symbols"] = spec.symbols;
        j["phi"] = spec.phi;
    }
    return j;
}

}  // namespace voi
