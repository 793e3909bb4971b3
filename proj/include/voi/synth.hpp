#pragma once

#include "voi/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace voi {

enum class SynthKind {
    // Two symbols: the response return is rho * (lag-1 signal) + independent
    // noise, so the population MI between the signal's lag-0 value and the
    // next response is -ln(1 - rho^2) / 2.
    GaussianChannel,
    // Independent AR(1) log-return series integrated into price paths.
    Ar1Panel,
};

struct SynthSpec {
    SynthKind kind = SynthKind::Ar1Panel;
    std::size_t symbols = 5;    // ar1_panel only
    double rho = 0.6;           // gaussian_channel
    double phi = 0.3;           // ar1_panel
    double noise_scale = 0.03;  // innovation standard deviation of the log-returns
    std::size_t length = 701;   // prices per symbol
    std::uint64_t seed = 0;
    double start_price = 100.0;
};

[[nodiscard]] std::string to_string(SynthKind kind);
[[nodiscard]] SynthKind synth_kind_from_string(const std::string& name);

/// Throws ConfigError on out-of-range parameters.
void validate(const SynthSpec& spec);

/// Symbol labels in emission order; the first is the response symbol.
[[nodiscard]] std::vector<std::string> synth_symbols(const SynthSpec& spec);

[[nodiscard]] std::vector<PriceSeries> synthesize(const SynthSpec& spec);

/// Population MI (nats) between the lag predictors and the next return of
/// the first symbol.
[[nodiscard]] double synth_population_mi(const SynthSpec& spec);

/// Population standard deviation of the first symbol's log-returns.
[[nodiscard]] double synth_response_sigma(const SynthSpec& spec);

/// `date,symbol,close` CSV, rows ordered by date then emission order.
[[nodiscard]] std::string prices_to_csv(const std::vector<PriceSeries>& series);

[[nodiscard]] nlohmann::json to_json(const SynthSpec& spec);

}  // namespace voi
