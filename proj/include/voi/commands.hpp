#pragma once

// Subcommand implementations behind the `voi` executable. Each command
// validates its options first, computes its outputs in memory, and only then
// writes files (atomically), so a failing command leaves nothing behind.

#include "voi/backtest.hpp"
#include "voi/synth.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace voi {

enum class InfoUnit { Nats, Bits };

[[nodiscard]] std::string to_string(InfoUnit unit);
[[nodiscard]] InfoUnit info_unit_from_string(const std::string& name);
[[nodiscard]] double to_unit(double nats, InfoUnit unit);

/// Parses "2-20", "1,3,5" or "1-3,7" into an ascending list.
[[nodiscard]] std::vector<std::size_t> parse_index_list(const std::string& text);

/// Target first, then the remaining symbols in the default listing order
/// (BTC/USD, ETH/USD, DAI/BTC, XRP/BTC, IOT/BTC), then alphabetically.
[[nodiscard]] std::vector<std::string> default_symbol_order(const std::vector<PriceSeries>& series,
                                                           const std::string& target);

struct RunConfig {
    std::string input;
    std::vector<std::string> symbols;  // empty: default_symbol_order
    BacktestConfig backtest;
    std::string output_dir = ".";
    InfoUnit units = InfoUnit::Bits;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig defaults = {});
void validate(const RunConfig& config);

inline constexpr const char* kOutputDirEnv = "VOI_OUTPUT_DIR";

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// --- frontier -------------------------------------------------------------

struct FrontierOptions {
    std::optional<double> sigma;
    std::optional<double> entropy_nats;
    double grid_start = 0.0;  // nats
    double grid_stop = 3.0;
    double grid_step = 0.5;
    InfoUnit units = InfoUnit::Bits;
};

/// Columns info,u,v,rmse; info in the requested unit.
[[nodiscard]] std::string frontier_csv(const FrontierOptions& options);

// --- mi -------------------------------------------------------------------

struct MiOptions {
    std::string input;
    std::string target;
    std::vector<std::string> symbols;
    std::vector<std::size_t> m_values{1};
    std::vector<std::size_t> n_values{2};
    double shrinkage = kDefaultShrinkage;
    WindowConfig window;
    InfoUnit units = InfoUnit::Bits;
};

[[nodiscard]] nlohmann::json mi_summary(const MiOptions& options);

// --- acf ------------------------------------------------------------------

struct AcfOptions {
    std::string input;
    std::string symbol;
    std::size_t max_lag = 20;
};

[[nodiscard]] std::string acf_csv(const AcfOptions& options);

// --- hartley --------------------------------------------------------------

struct HartleyOptions {
    std::vector<std::size_t> ks{1, 2, 4, 8};
    std::size_t n_samples = 100000;
    double sigma = 1.0;
    int restarts = 5;
    std::uint64_t seed = 0;
    InfoUnit units = InfoUnit::Bits;
};

/// Columns k,info,u_hartley,u_shannon,std_error.
[[nodiscard]] std::string hartley_csv(const HartleyOptions& options);

// --- synth ----------------------------------------------------------------

[[nodiscard]] std::string synth_csv(const SynthSpec& spec);

// --- backtest -------------------------------------------------------------

struct BacktestOutputs {
    nlohmann::json report;
    std::string overlay_csv;
};

[[nodiscard]] BacktestOutputs run_backtest(const RunConfig& config);

/// Writes report.json and overlay.csv under config.output_dir.
void write_backtest_outputs(const RunConfig& config, const BacktestOutputs& outputs);

}  // namespace voi
