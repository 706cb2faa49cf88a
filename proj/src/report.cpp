#include "ensreg/report.hpp"
#include "ensreg/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ensreg {

namespace {

using nlohmann::json;

std::string printf_string(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string full_precision(double v) { return printf_string("%.17g", v); }

std::string format_rank(double rank) { return printf_string("%g", rank); }

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

json metrics_json(const MetricReport& m)
{
    return {{"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}, {"r2", m.r2}, {"n", m.n}};
}

MetricReport metrics_from_json(const json& j)
{
    return {j.at("mae").get<double>(), j.at("mse").get<double>(), j.at("rmse").get<double>(),
            j.at("r2").get<double>(), j.at("n").get<std::size_t>()};
}

json significance_json(const SignificanceReport& s)
{
    json wlt = json::array();
    for (const auto& row : s.win_lose_tie) {
        json r = json::array();
        for (const auto& c : row)
            r.push_back({c.wins, c.losses, c.ties});
        wlt.push_back(r);
    }
    return {{"method_names", s.method_names},
            {"statistic", s.statistic},
            {"p_value", s.p_value},
            {"pairwise_p", s.pairwise_p},
            {"win_lose_tie", wlt}};
}

SignificanceReport significance_from_json(const json& j)
{
    SignificanceReport s;
    s.method_names = j.at("method_names").get<std::vector<std::string>>();
    s.statistic = j.at("statistic").get<double>();
    s.p_value = j.at("p_value").get<double>();
    s.pairwise_p = j.at("pairwise_p").get<std::vector<std::vector<double>>>();
    for (const auto& row : j.at("win_lose_tie")) {
        std::vector<WinLoseTie> r;
        for (const auto& c : row)
            r.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>(), c.at(2).get<std::size_t>()});
        s.win_lose_tie.push_back(std::move(r));
    }
    return s;
}

void render_table2(std::ostringstream& md, const MetricTable& t)
{
    const auto& methods = t.values.method_names;
    md << "| Dataset |";
    for (const auto& m : methods)
        md << ' ' << m << " |";
    md << "\n|---|";
    for (std::size_t j = 0; j < methods.size(); ++j)
        md << "---|";
    md << '\n';
    for (std::size_t d = 0; d < t.values.values.size(); ++d) {
        md << "| " << t.values.dataset_names[d] << " |";
        for (std::size_t j = 0; j < methods.size(); ++j)
            md << ' ' << format_ranked_cell(t.values.values[d][j], t.ranks.ranks[d][j]) << " |";
        md << '\n';
    }
    md << "| Average rank |";
    for (double r : t.ranks.average_ranks)
        md << ' ' << printf_string("%.4g", r) << " |";
    md << "\n\n";
}

void render_table3(std::ostringstream& md, const MetricTable& t)
{
    const auto& s = *t.significance;
    const auto& methods = s.method_names;
    md << "Friedman aligned ranks: T = " << printf_string("%.4f", s.statistic)
       << ", p = " << format_p_value(s.p_value) << "\n\n";
    md << "| " << t.metric << " |";
    for (const auto& m : methods)
        md << ' ' << m << " |";
    md << "\n|---|";
    for (std::size_t j = 0; j < methods.size(); ++j)
        md << "---|";
    md << '\n';
    for (std::size_t a = 0; a < methods.size(); ++a) {
        md << "| " << methods[a] << " |";
        for (std::size_t b = 0; b < methods.size(); ++b) {
            md << ' ';
            if (b > a) {
                const auto& w = s.win_lose_tie[a][b];
                md << w.wins << '/' << w.losses << '/' << w.ties;
            } else if (b < a) {
                md << format_p_value(s.pairwise_p[b][a]);
            }
            md << " |";
        }
        md << '\n';
    }
    md << '\n';
}

} // namespace

std::string format_ranked_cell(double value, double rank)
{
    return printf_string("%.4f", value) + " (" + format_rank(rank) + ")";
}

std::string format_p_value(double p)
{
    // Below 0.001 four decimals hide too much; switch to one significant digit.
    const std::string digits = p < 0.001 ? printf_string("%.0e", p) : printf_string("%.4f", p);
    const auto stars = significance_stars(p);
    return stars.empty() ? digits : stars + " " + digits;
}

std::string render_markdown(const ExperimentReport& report)
{
    std::ostringstream md;
    md << "# Benchmark report\n\nSeed: " << report.seed << "\n\n";
    for (const auto& t : report.tables) {
        md << "## " << t.metric << "\n\n";
        render_table2(md, t);
        if (t.significance) {
            md << "Upper diagonal: win/lose/tie. Lower diagonal: post-hoc aligned-rank p-values "
                  "(* p < 0.1, ** p < 0.05, *** p < 0.01).\n\n";
            render_table3(md, t);
        }
    }
    bool header = false;
    for (const auto& c : report.cells) {
        if (c.ok())
            continue;
        if (!header) {
            md << "## Failed cells\n\n";
            header = true;
        }
        md << "- " << c.dataset << " / " << c.method << ": " << c.error << '\n';
    }
    return md.str();
}

std::string render_metrics_csv(const ExperimentReport& report)
{
    std::ostringstream csv;
    csv << "dataset,method,metric,value,rank\n";
    for (std::size_t metric = 0; metric < std::size(kMetricNames); ++metric) {
        const MetricTable* table = nullptr;
        for (const auto& t : report.tables)
            if (t.metric == kMetricNames[metric])
                table = &t;
        for (std::size_t d = 0; d < report.dataset_names.size(); ++d) {
            // Row of this dataset inside the ranked table, if it made it in.
            std::size_t row = SIZE_MAX;
            if (table)
                for (std::size_t r = 0; r < table->values.dataset_names.size(); ++r)
                    if (table->values.dataset_names[r] == report.dataset_names[d])
                        row = r;
            for (std::size_t m = 0; m < report.method_names.size(); ++m) {
                const auto& cell = report.cell(d, m);
                csv << cell.dataset << ',' << cell.method << ',' << kMetricNames[metric] << ',';
                if (cell.ok()) {
                    const auto& r = *cell.metrics;
                    const double v = metric == 0 ? r.mae : metric == 1 ? r.mse : metric == 2 ? r.rmse : r.r2;
                    csv << full_precision(v);
                }
                csv << ',';
                if (row != SIZE_MAX)
                    csv << format_rank(table->ranks.ranks[row][m]);
                csv << '\n';
            }
        }
    }
    return csv.str();
}

std::string render_significance_csv(const ExperimentReport& report)
{
    std::ostringstream csv;
    csv << "metric,method_a,method_b,wins,losses,ties,p_value,stars\n";
    for (const auto& t : report.tables) {
        if (!t.significance)
            continue;
        const auto& s = *t.significance;
        for (std::size_t a = 0; a < s.method_names.size(); ++a)
            for (std::size_t b = a + 1; b < s.method_names.size(); ++b) {
                const auto& w = s.win_lose_tie[a][b];
                const double p = s.pairwise_p[a][b];
                csv << t.metric << ',' << s.method_names[a] << ',' << s.method_names[b] << ',' << w.wins << ','
                    << w.losses << ',' << w.ties << ',' << full_precision(p) << ',' << significance_stars(p) << '\n';
            }
    }
    return csv.str();
}

std::string render_timings_csv(const ExperimentReport& report)
{
    std::ostringstream csv;
    csv << "dataset,method,seconds\n";
    for (const auto& c : report.cells)
        csv << c.dataset << ',' << c.method << ',' << printf_string("%.6f", c.seconds) << '\n';
    return csv.str();
}

json report_to_json(const ExperimentReport& report)
{
    json j;
    j["config"] = report.config;
    j["seed"] = report.seed;
    j["datasets"] = report.dataset_names;
    j["methods"] = report.method_names;
    j["cells"] = json::array();
    for (const auto& c : report.cells) {
        json cj{{"dataset", c.dataset}, {"method", c.method}};
        cj["metrics"] = c.ok() ? metrics_json(*c.metrics) : json(nullptr);
        cj["error"] = c.error;
        j["cells"].push_back(cj);
    }
    j["tables"] = json::array();
    for (const auto& t : report.tables) {
        json tj{{"metric", t.metric},
                {"lower_is_better", t.values.lower_is_better},
                {"datasets", t.values.dataset_names},
                {"methods", t.values.method_names},
                {"values", t.values.values},
                {"ranks", t.ranks.ranks},
                {"average_ranks", t.ranks.average_ranks}};
        tj["significance"] = t.significance ? significance_json(*t.significance) : json(nullptr);
        j["tables"].push_back(tj);
    }
    return j;
}

ExperimentReport report_from_json(const json& doc)
{
    try {
        ExperimentReport r;
        r.config = doc.at("config");
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.dataset_names = doc.at("datasets").get<std::vector<std::string>>();
        r.method_names = doc.at("methods").get<std::vector<std::string>>();
        for (const auto& cj : doc.at("cells")) {
            CellResult c;
            c.dataset = cj.at("dataset").get<std::string>();
            c.method = cj.at("method").get<std::string>();
            if (!cj.at("metrics").is_null())
                c.metrics = metrics_from_json(cj.at("metrics"));
            c.error = cj.at("error").get<std::string>();
            r.cells.push_back(std::move(c));
        }
        for (const auto& tj : doc.at("tables")) {
            MetricTable t;
            t.metric = tj.at("metric").get<std::string>();
            t.values.lower_is_better = tj.at("lower_is_better").get<bool>();
            t.values.dataset_names = tj.at("datasets").get<std::vector<std::string>>();
            t.values.method_names = tj.at("methods").get<std::vector<std::string>>();
            t.values.values = tj.at("values").get<std::vector<std::vector<double>>>();
            t.ranks.ranks = tj.at("ranks").get<std::vector<std::vector<double>>>();
            t.ranks.average_ranks = tj.at("average_ranks").get<std::vector<double>>();
            if (!tj.at("significance").is_null())
                t.significance = significance_from_json(tj.at("significance"));
            r.tables.push_back(std::move(t));
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed report: ") + e.what());
    }
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::string& format,
                                               const std::filesystem::path& dir)
{
    const bool all = format == "all";
    if (!all && format != "markdown" && format != "csv" && format != "json")
        throw Error(ErrorCode::InvalidArgument, "unknown report format '" + format + "'");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& content) {
        write_file(dir / name, content);
        written.push_back(dir / name);
    };
    if (all || format == "markdown")
        put("report.md", render_markdown(report));
    if (all || format == "csv") {
        put("metrics.csv", render_metrics_csv(report));
        put("significance.csv", render_significance_csv(report));
    }
    if (all || format == "json")
        put("report.json", report_to_json(report).dump(2) + "\n");
    put("timings.csv", render_timings_csv(report));
    return written;
}

} // namespace ensreg
