#pragma once

#include "ensreg/ensemble.hpp"
#include "ensreg/learners.hpp"
#include "ensreg/metrics.hpp"
#include "ensreg/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ensreg {

enum class Method { Rrmse, Vru, Br, Dwr, Bem, Gem };

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view name);
/// Upper-case label used in rendered tables ("RRMSE", "VRU", ...).
std::string display_name(Method m);

struct SyntheticSpec {
    std::string kind;
    std::size_t n = 0;
    std::size_t m = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const SyntheticSpec&) const = default;
};

/// A dataset is either a CSV file with a named target column or a synthetic
/// generator call.
struct DatasetSource {
    std::string name;
    std::filesystem::path path;
    std::string target;
    std::optional<SyntheticSpec> synthetic;

    bool operator==(const DatasetSource&) const = default;
};

Dataset load_dataset(const DatasetSource& source);

struct ExperimentConfig {
    std::vector<DatasetSource> datasets;
    std::vector<Method> methods;
    std::vector<LearnerSpec> pool = default_pool();
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    WeightSource weight_source = WeightSource::Holdout;
    double holdout_fraction = 0.2;
    std::size_t k_nn = 10;
    std::size_t n_bags_per_spec = 5;
    std::filesystem::path output_dir = "bench_out";
    std::size_t workers = 1;
    std::string format = "all";
};

/// Relative dataset paths resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Everything that influences results; output location, worker count and
/// format are left out so equal experiments echo identically.
nlohmann::json config_echo(const ExperimentConfig& config);

/// Throws ConfigError on structural problems or missing files. Returns
/// warnings, e.g. a registered dataset whose file shape differs from the
/// published one.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Public benchmark datasets with their published shapes. Nothing is
/// downloaded; files must be fetched and converted to numeric CSV by hand.
struct RegisteredDataset {
    std::string name;
    std::string url;
    std::size_t rows;
    std::size_t features;
    std::string target;
};
const std::vector<RegisteredDataset>& dataset_registry();

/// Six seeded synthetic stand-ins sized for desk-scale runs.
std::vector<DatasetSource> bundled_synthetic_datasets();

struct CellResult {
    std::string dataset;
    std::string method;
    std::optional<MetricReport> metrics;
    std::string error;
    double seconds = 0.0; ///< wall clock; not part of the reproducible content

    bool ok() const noexcept { return metrics.has_value(); }
    bool operator==(const CellResult& o) const
    {
        return dataset == o.dataset && method == o.method && metrics == o.metrics && error == o.error;
    }
};

struct MetricTable {
    std::string metric; ///< MAE, MSE, RMSE or R2
    ResultMatrix values;
    RankMatrix ranks;
    std::optional<SignificanceReport> significance;

    bool operator==(const MetricTable&) const = default;
};

struct ExperimentReport {
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::string> dataset_names;
    std::vector<std::string> method_names;
    std::vector<CellResult> cells; ///< dataset-major, methods in config order
    std::vector<MetricTable> tables;

    bool has_failures() const;
    const CellResult& cell(std::size_t dataset, std::size_t method) const
    {
        return cells[dataset * method_names.size() + method];
    }

    bool operator==(const ExperimentReport&) const = default;
};

inline constexpr std::string_view kMetricNames[] = {"MAE", "MSE", "RMSE", "R2"};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Seed for one (dataset, method) cell; adding a method leaves other cells alone.
std::uint64_t cell_seed(std::uint64_t global, std::string_view dataset, std::string_view method);

} // namespace ensreg
