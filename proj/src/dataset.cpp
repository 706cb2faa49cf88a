#include "ensreg/dataset.hpp"
#include "ensreg/error.hpp"
#include "ensreg/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ensreg {

namespace {

std::vector<std::string> default_names(std::size_t m)
{
    std::vector<std::string> names(m);
    for (std::size_t j = 0; j < m; ++j)
        names[j] = "x" + std::to_string(j);
    return names;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_line(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_real(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

} // namespace

Dataset::Dataset(Matrix features, std::vector<double> targets, std::vector<std::string> feature_names,
                 std::string target_name)
    : features_(std::move(features)), targets_(std::move(targets)),
      feature_names_(std::move(feature_names)), target_name_(std::move(target_name))
{
    validate();
}

Dataset::Dataset(Matrix features, std::vector<double> targets)
    : features_(std::move(features)), targets_(std::move(targets)), target_name_("y")
{
    feature_names_ = default_names(features_.cols());
    validate();
}

void Dataset::validate() const
{
    if (features_.rows() != targets_.size())
        throw Error(ErrorCode::DimensionMismatch, "feature rows (" + std::to_string(features_.rows()) +
                                                      ") != target length (" +
                                                      std::to_string(targets_.size()) + ")");
    if (feature_names_.size() != features_.cols())
        throw Error(ErrorCode::DimensionMismatch, "feature name count does not match column count");
    if (features_.cols() < 1)
        throw Error(ErrorCode::EmptyDataset, "dataset needs at least one feature column");
    if (targets_.size() < 2)
        throw Error(ErrorCode::EmptyDataset, "dataset needs at least two rows");
    for (double v : features_.data())
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonNumericCell, "non-finite feature value");
    for (double v : targets_)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonNumericCell, "non-finite target value");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    std::vector<double> t(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        t[i] = targets_[rows[i]];
    return Dataset(features_.select_rows(rows), std::move(t), feature_names_, target_name_);
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const
{
    if (in.size() != means.size() || out.size() != means.size())
        throw Error(ErrorCode::DimensionMismatch, "standardizer expects " + std::to_string(means.size()) +
                                                      " columns, got " + std::to_string(in.size()));
    for (std::size_t j = 0; j < in.size(); ++j)
        out[j] = (in[j] - means[j]) / std_devs[j];
}

Matrix Standardizer::apply(const Matrix& x) const
{
    if (x.cols() != means.size())
        throw Error(ErrorCode::DimensionMismatch, "standardizer expects " + std::to_string(means.size()) +
                                                      " columns, got " + std::to_string(x.cols()));
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        apply_row(x.row(r), out.row(r));
    return out;
}

Standardizer standardize_fit(const Matrix& x)
{
    const std::size_t n = x.rows();
    const std::size_t m = x.cols();
    if (n == 0)
        throw Error(ErrorCode::EmptyInput, "cannot fit a standardizer on zero rows");
    Standardizer s{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < m; ++j)
            s.means[j] += x(r, j);
    for (auto& mu : s.means)
        mu /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < m; ++j) {
            const double d = x(r, j) - s.means[j];
            s.std_devs[j] += d * d;
        }
    for (auto& sd : s.std_devs) {
        sd = std::sqrt(sd / static_cast<double>(n));
        if (!(sd > 0.0))
            sd = 1.0;
    }
    return s;
}

Standardizer standardize_fit(const Dataset& d) { return standardize_fit(d.features()); }

Dataset standardize_apply(const Standardizer& s, const Dataset& d)
{
    return Dataset(s.apply(d.features()), d.targets(), d.feature_names(), d.target_name());
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MissingFile, path.string());

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyDataset, path.string() + " has no header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);

    std::vector<std::string> header;
    for (auto cell : split_line(line))
        header.emplace_back(cell);

    std::size_t target_index = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == target_column) {
            target_index = j;
            break;
        }
    if (target_index == header.size())
        throw Error(ErrorCode::MissingTargetColumn, "'" + target_column + "' not in header of " + path.string());

    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target_index)
            feature_names.push_back(header[j]);

    std::vector<double> cells;
    std::vector<double> targets;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++row;
        const auto parts = split_line(line);
        for (std::size_t j = 0; j < header.size(); ++j) {
            const auto value = j < parts.size() ? parse_real(parts[j]) : std::nullopt;
            if (!value || parts.size() != header.size())
                throw Error(ErrorCode::NonNumericCell,
                            "row " + std::to_string(row) + ", column '" + header[j] + "'");
            if (j == target_index)
                targets.push_back(*value);
            else
                cells.push_back(*value);
        }
    }
    if (targets.size() < 2)
        throw Error(ErrorCode::EmptyDataset, path.string() + " has fewer than two data rows");
    if (feature_names.empty())
        throw Error(ErrorCode::EmptyDataset, path.string() + " has no feature columns");

    Matrix features(targets.size(), feature_names.size());
    std::copy(cells.begin(), cells.end(), features.row(0).begin());
    return Dataset(std::move(features), std::move(targets), std::move(feature_names), target_column);
}

void write_csv(const Dataset& d, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.precision(17);
    for (const auto& name : d.feature_names())
        out << name << ',';
    out << d.target_name() << '\n';
    for (std::size_t r = 0; r < d.n(); ++r) {
        for (double v : d.features().row(r))
            out << v << ',';
        out << d.targets()[r] << '\n';
    }
    if (!out)
        throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error(ErrorCode::InvalidFraction, "test fraction must lie in (0, 1), got " +
                                                    std::to_string(test_fraction));
    const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction));
    if (n_test < 1 || n_test >= n)
        throw Error(ErrorCode::TooFewRows, "cannot split " + std::to_string(n) + " rows at fraction " +
                                               std::to_string(test_fraction));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    return {std::move(train), std::move(test)};
}

SplitPair train_test_split(const Dataset& d, double test_fraction, std::uint64_t seed)
{
    auto [train_rows, test_rows] = split_indices(d.n(), test_fraction, seed);
    auto train = d.subset(train_rows);
    auto test = d.subset(test_rows);
    return SplitPair{std::move(train), std::move(test), std::move(train_rows), std::move(test_rows), seed,
                     test_fraction};
}

LinearTruth synth_linear_truth(std::size_t m)
{
    LinearTruth truth{std::vector<double>(m), 2.0};
    for (std::size_t j = 0; j < m; ++j)
        truth.weights[j] = 1.0 + 0.5 * static_cast<double>(j);
    return truth;
}

std::pair<double, double> synth_piecewise_range(std::size_t m, double noise)
{
    double top = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        top += 3.0 * static_cast<double>(j % 3 + 1);
    return {5.0 - noise, 5.0 + top + noise};
}

Dataset synth_generate(const std::string& kind, std::size_t n, std::size_t m, double noise, std::uint64_t seed)
{
    if (kind != "linear" && kind != "friedman1" && kind != "piecewise")
        throw Error(ErrorCode::UnknownKind, "unknown synthetic generator '" + kind + "'");
    if (n < 4)
        throw Error(ErrorCode::TooFewRows, "synthetic data needs n >= 4");
    if (m < 1)
        throw Error(ErrorCode::DimensionMismatch, "synthetic data needs m >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw Error(ErrorCode::InvalidHyperparameter, "noise must be finite and >= 0");

    Rng rng(seed);
    Matrix x(n, m);
    std::vector<double> y(n);
    const auto truth = synth_linear_truth(m);

    for (std::size_t r = 0; r < n; ++r) {
        auto row = x.row(r);
        for (auto& v : row)
            v = rng.uniform();
        // Features the friedman1 formula needs but m lacks are held at 0.5.
        auto feat = [&](std::size_t j) { return j < m ? row[j] : 0.5; };

        double target = 0.0;
        if (kind == "linear") {
            target = truth.intercept;
            for (std::size_t j = 0; j < m; ++j)
                target += truth.weights[j] * row[j];
            target += noise * rng.normal();
        } else if (kind == "friedman1") {
            target = 10.0 * std::sin(std::numbers::pi * feat(0) * feat(1)) +
                     20.0 * (feat(2) - 0.5) * (feat(2) - 0.5) + 10.0 * feat(3) + 5.0 * feat(4);
            target += noise * rng.normal();
        } else {
            target = 5.0;
            for (std::size_t j = 0; j < m; ++j)
                target += static_cast<double>(j % 3 + 1) * std::floor(4.0 * row[j]);
            target += noise * rng.uniform(-1.0, 1.0);
        }
        y[r] = target;
    }
    return Dataset(std::move(x), std::move(y));
}

} // namespace ensreg
