#include "ensreg/bench.hpp"
#include "ensreg/dataset.hpp"
#include "ensreg/error.hpp"
#include "ensreg/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

int run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
        std::optional<std::string> format, std::optional<std::size_t> workers)
{
    auto config = ensreg::load_config(config_path);
    if (seed)
        config.seed = *seed;
    if (out)
        config.output_dir = *out;
    if (format)
        config.format = *format;
    if (workers)
        config.workers = *workers;

    for (const auto& w : ensreg::validate_config(config))
        std::cerr << "warning: " << w << '\n';

    const auto report = ensreg::run_experiment(config);
    for (const auto& path : ensreg::emit_report(report, config.format, config.output_dir))
        std::cout << "wrote " << path.string() << '\n';

    if (report.has_failures()) {
        for (const auto& c : report.cells)
            if (!c.ok())
                std::cerr << "cell failed: " << c.dataset << " / " << c.method << ": " << c.error << '\n';
        return kExitPartial;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heterogeneous ensemble regression benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> workers;
    auto* run_cmd = app.add_subcommand("run", "Run every (dataset, method) cell and write reports");
    run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run_cmd->add_option("--seed", seed, "Override the global seed");
    run_cmd->add_option("--out", out, "Override the output directory");
    run_cmd->add_option("--format", format, "markdown, csv, json or all")
        ->check(CLI::IsMember({"markdown", "csv", "json", "all"}));
    run_cmd->add_option("--workers", workers, "Concurrent cells")->check(CLI::PositiveNumber);

    auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
    validate_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();

    std::string kind;
    std::size_t n = 0;
    std::size_t m = 0;
    double noise = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
    synth_cmd->add_option("--kind", kind, "linear, friedman1 or piecewise")->required();
    synth_cmd->add_option("--n", n, "Rows")->required();
    synth_cmd->add_option("--m", m, "Features")->required();
    synth_cmd->add_option("--noise", noise, "Noise scale")->default_val(0.0);
    synth_cmd->add_option("--seed", synth_seed, "Generator seed")->default_val(0);
    synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd)
            return run(config_path, seed, out, format, workers);
        if (*validate_cmd) {
            const auto config = ensreg::load_config(config_path);
            for (const auto& w : ensreg::validate_config(config))
                std::cerr << "warning: " << w << '\n';
            std::cout << "config ok: " << config.datasets.size() << " datasets, " << config.methods.size()
                      << " methods, " << config.pool.size() << " learners\n";
            return kExitOk;
        }
        ensreg::write_csv(ensreg::synth_generate(kind, n, m, noise, synth_seed), synth_out);
        std::cout << "wrote " << synth_out << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
