#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dck/estimator.hpp"
#include "dck/kernels.hpp"
#include "dck/quadrature.hpp"

namespace dck::cli {

/// Points either listed explicitly or spaced evenly on [start, stop].
struct GridSpec {
    std::vector<double> points;
    std::optional<double> start;
    std::optional<double> stop;
    std::size_t count = 0;
    bool matlab_default = false;  ///< sorted draws of Matlab's default rand

    [[nodiscard]] std::vector<double> resolve() const;
};

struct EstimationBlock {
    std::optional<double> gamma;
    std::vector<double> gamma_grid;  ///< empty: no search
    std::string input = "zoh";       ///< zoh | impulse | step | exp_sum
    std::vector<std::pair<double, double>> input_terms;
    double noise_variance = 0.0;
    GridSpec eval_times;
};

struct SamplingBlock {
    std::uint64_t seed = 1;
    std::size_t count = 1000;
    std::string process = "dc";  ///< dc | dc_markov | genspline
    GridSpec grid;
};

struct ExpandBlock {
    std::size_t truncation = 1000;
    GridSpec grid;
};

struct NormBlock {
    std::vector<std::pair<double, double>> terms{{1.0, 1.0}};
    std::size_t truncation = 500;
};

struct TridiagBlock {
    GridSpec grid;
    bool heatmap = true;
};

struct VerifyBlock {
    std::uint64_t seed = 20240501;
    std::size_t mc_samples = 100000;
    std::size_t random_grids = 20;
    std::size_t tridiag_draws = 50;
    std::size_t norm_triples = 10;
    std::uint32_t reference_grid_seed = 5489;
};

struct RunConfig {
    KernelSpec kernel = KernelSpec::dc(1.0, 0.5);
    QuadratureConfig quadrature;
    EstimationBlock estimation;
    SamplingBlock sampling;
    ExpandBlock expand;
    NormBlock norm;
    TridiagBlock tridiag;
    VerifyBlock verify;
    std::filesystem::path out_dir = "out";

    /// Normalized JSON of every effective setting; input to the hash.
    nlohmann::json effective;
    std::string hash;  ///< FNV-1a 64 of effective.dump(), 16 hex digits
};

/// Parses and validates a configuration. Unknown keys, wrong types and
/// invalid values throw InputError naming the offending key.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Overrides every seed in the configuration and refreshes the hash.
void apply_seed(RunConfig& cfg, std::uint64_t seed);

[[nodiscard]] std::string fnv1a_hex(const std::string& bytes);

[[nodiscard]] nlohmann::json kernel_to_json(const KernelSpec& spec);

}  // namespace dck::cli
