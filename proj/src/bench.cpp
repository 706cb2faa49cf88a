#include "ensreg/bench.hpp"
#include "ensreg/error.hpp"
#include "ensreg/parallel.hpp"
#include "ensreg/rng.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>

namespace ensreg {

namespace {

using nlohmann::json;

constexpr Method kAllMethods[] = {Method::Rrmse, Method::Vru, Method::Br, Method::Dwr, Method::Bem, Method::Gem};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <typename T>
T field(const json& obj, const char* key, T fallback)
{
    if (!obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(std::string("field '") + key + "': " + e.what());
    }
}

std::size_t count_field(const json& obj, const char* key, std::size_t fallback, std::size_t min_value)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() || v.get<std::size_t>() < min_value)
        config_error(std::string("field '") + key + "' must be an integer >= " + std::to_string(min_value));
    return v.get<std::size_t>();
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

LearnerSpec parse_learner(const json& j)
{
    if (!j.is_object() || !j.contains("kind"))
        config_error("pool entries need a 'kind'");
    LearnerSpec spec;
    try {
        spec.kind = learner_kind_from_string(j.at("kind").get<std::string>());
    } catch (const Error& e) {
        config_error(e.what());
    }
    if (j.contains("params")) {
        if (!j.at("params").is_object())
            config_error("'params' must be an object");
        for (const auto& [key, value] : j.at("params").items()) {
            if (!value.is_number())
                config_error("hyperparameter '" + key + "' must be numeric");
            spec.hyperparameters[key] = value.get<double>();
        }
    }
    spec.seed = field<std::uint64_t>(j, "seed", 0);
    try {
        validate(spec);
    } catch (const Error& e) {
        config_error(e.what());
    }
    return spec;
}

DatasetSource parse_dataset(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object())
        config_error("dataset entries must be objects");
    DatasetSource d;
    d.name = field<std::string>(j, "name", "");
    if (d.name.empty())
        config_error("every dataset needs a 'name'");
    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        SyntheticSpec spec;
        spec.kind = field<std::string>(s, "kind", "");
        spec.n = count_field(s, "n", 0, 4);
        spec.m = count_field(s, "m", 0, 1);
        spec.noise = field<double>(s, "noise", 0.0);
        spec.seed = field<std::uint64_t>(s, "seed", 0);
        if (spec.kind != "linear" && spec.kind != "friedman1" && spec.kind != "piecewise")
            config_error("dataset '" + d.name + "': unknown synthetic kind '" + spec.kind + "'");
        if (spec.n < 4 || spec.m < 1 || spec.noise < 0.0)
            config_error("dataset '" + d.name + "': synthetic needs n >= 4, m >= 1, noise >= 0");
        d.synthetic = spec;
        return d;
    }
    const auto path = field<std::string>(j, "path", "");
    d.target = field<std::string>(j, "target", "");
    if (path.empty() || d.target.empty())
        config_error("dataset '" + d.name + "' needs either 'synthetic' or both 'path' and 'target'");
    d.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
    return d;
}

json learner_json(const LearnerSpec& spec)
{
    json j{{"kind", std::string(to_string(spec.kind))}, {"seed", spec.seed}};
    j["params"] = json::object();
    for (const auto& [key, value] : spec.hyperparameters)
        j["params"][key] = value;
    return j;
}

MetricReport evaluate_method(Method method, const ExperimentConfig& config, const std::vector<LearnerSpec>& pool,
                             const SplitPair& split, std::uint64_t seed)
{
    EnsembleConfig ec;
    ec.weight_source = config.weight_source;
    ec.holdout_fraction = config.holdout_fraction;
    ec.seed = seed;
    ec.k_nn = config.k_nn;
    ec.threads = 1; // cells already run in parallel

    const auto model = [&] {
        switch (method) {
        case Method::Rrmse: return fit_voting(pool, split.train, Strategy::Rrmse, ec);
        case Method::Vru: return fit_voting(pool, split.train, Strategy::Uniform, ec);
        case Method::Bem: return fit_voting(pool, split.train, Strategy::Bem, ec);
        case Method::Gem: return fit_voting(pool, split.train, Strategy::Gem, ec);
        case Method::Dwr: return fit_dwr(pool, split.train, config.k_nn, ec);
        case Method::Br: return fit_bagging(pool, split.train, config.n_bags_per_spec, seed, ec);
        }
        throw Error(ErrorCode::UnknownMethod, "unhandled method");
    }();
    const auto predictions = model.predict(split.test.features());
    return evaluate(split.test.targets(), predictions);
}

double metric_value(const MetricReport& m, std::size_t metric)
{
    switch (metric) {
    case 0: return m.mae;
    case 1: return m.mse;
    case 2: return m.rmse;
    default: return m.r2;
    }
}

} // namespace

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Rrmse: return "rrmse";
    case Method::Vru: return "vru";
    case Method::Br: return "br";
    case Method::Dwr: return "dwr";
    case Method::Bem: return "bem";
    case Method::Gem: return "gem";
    }
    return "?";
}

Method method_from_string(std::string_view name)
{
    const auto key = lower(std::string(name));
    for (auto m : kAllMethods)
        if (to_string(m) == key)
            return m;
    throw Error(ErrorCode::UnknownMethod, "unknown method '" + std::string(name) + "'");
}

std::string display_name(Method m)
{
    std::string s(to_string(m));
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

Dataset load_dataset(const DatasetSource& source)
{
    if (source.synthetic) {
        const auto& s = *source.synthetic;
        return synth_generate(s.kind, s.n, s.m, s.noise, s.seed);
    }
    return load_csv(source.path, source.target);
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
    if (!doc.is_object())
        config_error("config must be a JSON object");
    ExperimentConfig c;

    if (!doc.contains("datasets") || !doc.at("datasets").is_array())
        config_error("'datasets' must be an array");
    for (const auto& d : doc.at("datasets"))
        c.datasets.push_back(parse_dataset(d, base_dir));

    if (!doc.contains("methods") || !doc.at("methods").is_array())
        config_error("'methods' must be an array");
    for (const auto& m : doc.at("methods")) {
        if (!m.is_string())
            config_error("method names must be strings");
        try {
            c.methods.push_back(method_from_string(m.get<std::string>()));
        } catch (const Error& e) {
            config_error(e.what());
        }
    }

    if (doc.contains("pool")) {
        if (!doc.at("pool").is_array())
            config_error("'pool' must be an array");
        c.pool.clear();
        for (const auto& p : doc.at("pool"))
            c.pool.push_back(parse_learner(p));
    }

    c.test_fraction = field<double>(doc, "test_fraction", c.test_fraction);
    c.seed = field<std::uint64_t>(doc, "seed", c.seed);
    try {
        c.weight_source = weight_source_from_string(field<std::string>(doc, "weight_source", "holdout"));
    } catch (const Error& e) {
        config_error(e.what());
    }
    c.holdout_fraction = field<double>(doc, "holdout_fraction", c.holdout_fraction);
    c.k_nn = count_field(doc, "k_nn", c.k_nn, 1);
    c.n_bags_per_spec = count_field(doc, "n_bags_per_spec", c.n_bags_per_spec, 1);
    if (doc.contains("output_dir")) {
        const std::filesystem::path out = field<std::string>(doc, "output_dir", "");
        c.output_dir = out.is_absolute() ? out : base_dir / out;
    }
    c.workers = count_field(doc, "workers", c.workers, 1);
    c.format = field<std::string>(doc, "format", c.format);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        config_error(path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

json config_echo(const ExperimentConfig& c)
{
    json j;
    j["datasets"] = json::array();
    for (const auto& d : c.datasets) {
        json dj{{"name", d.name}};
        if (d.synthetic)
            dj["synthetic"] = {{"kind", d.synthetic->kind},
                               {"n", d.synthetic->n},
                               {"m", d.synthetic->m},
                               {"noise", d.synthetic->noise},
                               {"seed", d.synthetic->seed}};
        else {
            dj["path"] = d.path.filename().string();
            dj["target"] = d.target;
        }
        j["datasets"].push_back(dj);
    }
    j["methods"] = json::array();
    for (auto m : c.methods)
        j["methods"].push_back(std::string(to_string(m)));
    j["pool"] = json::array();
    for (const auto& spec : c.pool)
        j["pool"].push_back(learner_json(spec));
    j["test_fraction"] = c.test_fraction;
    j["seed"] = c.seed;
    j["weight_source"] = std::string(to_string(c.weight_source));
    j["holdout_fraction"] = c.holdout_fraction;
    j["k_nn"] = c.k_nn;
    j["n_bags_per_spec"] = c.n_bags_per_spec;
    return j;
}

std::vector<std::string> validate_config(const ExperimentConfig& c)
{
    if (c.datasets.empty())
        config_error("at least one dataset is required");
    if (c.methods.empty())
        config_error("at least one method is required");
    if (c.pool.empty())
        config_error("the learner pool is empty");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
        config_error("test_fraction must lie in (0, 1)");
    if (!(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0))
        config_error("holdout_fraction must lie in (0, 1)");
    if (c.format != "all" && c.format != "markdown" && c.format != "csv" && c.format != "json")
        config_error("format must be markdown, csv, json or all");

    std::vector<std::string> names;
    for (const auto& d : c.datasets) {
        if (std::find(names.begin(), names.end(), d.name) != names.end())
            config_error("duplicate dataset name '" + d.name + "'");
        names.push_back(d.name);
    }
    for (std::size_t i = 0; i < c.methods.size(); ++i)
        for (std::size_t j = i + 1; j < c.methods.size(); ++j)
            if (c.methods[i] == c.methods[j])
                config_error("duplicate method '" + std::string(to_string(c.methods[i])) + "'");
    for (const auto& spec : c.pool) {
        try {
            validate(spec);
        } catch (const Error& e) {
            config_error(e.what());
        }
    }

    std::vector<std::string> warnings;
    for (const auto& d : c.datasets) {
        if (d.synthetic)
            continue;
        if (!std::filesystem::is_regular_file(d.path))
            config_error("dataset '" + d.name + "': file not found: " + d.path.string());
        for (const auto& reg : dataset_registry()) {
            if (lower(reg.name) != lower(d.name))
                continue;
            try {
                const auto data = load_csv(d.path, d.target);
                if (data.n() != reg.rows || data.m() != reg.features)
                    warnings.push_back("dataset '" + d.name + "' has " + std::to_string(data.n()) + "x" +
                                       std::to_string(data.m()) + ", published shape is " +
                                       std::to_string(reg.rows) + "x" + std::to_string(reg.features));
            } catch (const Error& e) {
                warnings.push_back("dataset '" + d.name + "' failed to load: " + e.what());
            }
        }
    }
    return warnings;
}

const std::vector<RegisteredDataset>& dataset_registry()
{
    static const std::vector<RegisteredDataset> registry{
        {"abalone", "https://archive.ics.uci.edu/dataset/1/abalone", 4177, 8, "rings"},
        {"car", "https://archive.ics.uci.edu/dataset/9/auto+mpg", 398, 7, "mpg"},
        {"diamond", "https://ggplot2.tidyverse.org/reference/diamonds.html", 53940, 9, "price"},
        {"airfoil", "https://archive.ics.uci.edu/dataset/291/airfoil+self+noise", 1503, 5, "sound_pressure"},
        {"smart_grid", "https://archive.ics.uci.edu/dataset/471/electrical+grid+stability+simulated+data", 60000, 12,
         "stab"},
        {"elongation", "", 385, 17, "elongation"},
    };
    return registry;
}

std::vector<DatasetSource> bundled_synthetic_datasets()
{
    auto synth = [](std::string name, std::string kind, std::size_t n, std::size_t m, double noise,
                    std::uint64_t seed) {
        return DatasetSource{std::move(name), {}, {}, SyntheticSpec{std::move(kind), n, m, noise, seed}};
    };
    return {
        synth("abalone_syn", "friedman1", 600, 8, 2.0, 101),
        synth("car_syn", "linear", 398, 7, 0.5, 102),
        synth("diamond_syn", "piecewise", 600, 9, 0.5, 103),
        synth("airfoil_syn", "friedman1", 600, 5, 0.5, 104),
        synth("grid_syn", "piecewise", 500, 12, 0.2, 105),
        synth("elongation_syn", "linear", 385, 17, 1.0, 106),
    };
}

bool ExperimentReport::has_failures() const
{
    return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok(); });
}

std::uint64_t cell_seed(std::uint64_t global, std::string_view dataset, std::string_view method)
{
    return mix_seed(mix_seed(global, dataset), method);
}

ExperimentReport run_experiment(const ExperimentConfig& config)
{
    validate_config(config);

    ExperimentReport report;
    report.config = config_echo(config);
    report.seed = config.seed;
    for (const auto& d : config.datasets)
        report.dataset_names.push_back(d.name);
    for (auto m : config.methods)
        report.method_names.push_back(display_name(m));

    const std::size_t n_data = config.datasets.size();
    const std::size_t n_methods = config.methods.size();

    // Splits and pools are shared by every method on a dataset.
    std::vector<std::optional<SplitPair>> splits(n_data);
    std::vector<std::string> load_errors(n_data);
    std::vector<std::vector<LearnerSpec>> pools(n_data);
    for (std::size_t d = 0; d < n_data; ++d) {
        const std::uint64_t data_seed = mix_seed(config.seed, config.datasets[d].name);
        try {
            splits[d] = train_test_split(load_dataset(config.datasets[d]), config.test_fraction, data_seed);
        } catch (const std::exception& e) {
            load_errors[d] = e.what();
        }
        pools[d] = config.pool;
        for (auto& spec : pools[d])
            spec.seed = mix_seed(data_seed, spec.seed);
    }

    report.cells.resize(n_data * n_methods);
    parallel_for(report.cells.size(), config.workers, [&](std::size_t i) {
        const std::size_t d = i / n_methods;
        const Method method = config.methods[i % n_methods];
        auto& cell = report.cells[i];
        cell.dataset = config.datasets[d].name;
        cell.method = display_name(method);
        if (!splits[d]) {
            cell.error = load_errors[d];
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            cell.metrics = evaluate_method(method, config, pools[d], *splits[d],
                                           cell_seed(config.seed, cell.dataset, to_string(method)));
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    // Tables cover the datasets on which every method succeeded.
    std::vector<std::size_t> complete;
    for (std::size_t d = 0; d < n_data; ++d) {
        bool ok = true;
        for (std::size_t m = 0; m < n_methods; ++m)
            ok = ok && report.cell(d, m).ok();
        if (ok)
            complete.push_back(d);
    }
    if (complete.empty())
        return report;

    for (std::size_t metric = 0; metric < std::size(kMetricNames); ++metric) {
        MetricTable table;
        table.metric = std::string(kMetricNames[metric]);
        table.values.method_names = report.method_names;
        table.values.lower_is_better = metric != 3;
        for (std::size_t d : complete) {
            table.values.dataset_names.push_back(report.dataset_names[d]);
            std::vector<double> row;
            for (std::size_t m = 0; m < n_methods; ++m)
                row.push_back(metric_value(*report.cell(d, m).metrics, metric));
            table.values.values.push_back(std::move(row));
        }
        table.ranks = rank_rows(table.values);
        if (n_methods >= 2 && complete.size() >= 2) {
            try {
                table.significance = significance(table.values);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateMatrix)
                    throw;
            }
        }
        report.tables.push_back(std::move(table));
    }
    return report;
}

} // namespace ensreg
