#include "helpers.hpp"

#include "ensreg/dataset.hpp"
#include "ensreg/learners.hpp"

#include <algorithm>
#include <cmath>

using namespace ensreg;
using testing::error_code_of;

TEST_CASE("load_csv picks the target column by name")
{
    testing::TempDir dir("csv_basic");
    const auto path = dir.write("d.csv", "a,y,b\n1,10,2\n3,30,4\n5,50,6\n");
    const auto d = load_csv(path, "y");
    CHECK(d.n() == 3);
    CHECK(d.m() == 2);
    CHECK(d.target_name() == "y");
    CHECK(d.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(d.targets() == std::vector<double>{10, 30, 50});
    CHECK(d.features()(2, 0) == 5);
    CHECK(d.features()(2, 1) == 6);
}

TEST_CASE("load_csv tolerates CRLF, BOM, padding and blank lines")
{
    testing::TempDir dir("csv_dialect");
    const auto path = dir.write("d.csv", "\xEF\xBB\xBF" "x , y\r\n 1.5 ,2e1\r\n\r\n-3,4\r\n");
    const auto d = load_csv(path, "y");
    CHECK(d.n() == 2);
    CHECK(d.features()(0, 0) == 1.5);
    CHECK(d.targets()[0] == 20.0);
}

TEST_CASE("load_csv errors")
{
    testing::TempDir dir("csv_errors");
    CHECK(error_code_of([&] { load_csv(dir.path / "nope.csv", "y"); }) == ErrorCode::MissingFile);

    const auto ok = dir.write("ok.csv", "a,y\n1,2\n3,4\n");
    CHECK(error_code_of([&] { load_csv(ok, "z"); }) == ErrorCode::MissingTargetColumn);

    const auto bad = dir.write("bad.csv", "a,y\n1,2\nabc,4\n");
    try {
        load_csv(bad, "y");
        FAIL("expected NonNumericCell");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNumericCell);
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }

    CHECK(error_code_of([&] { load_csv(dir.write("nan.csv", "a,y\n1,2\nnan,4\n"), "y"); }) ==
          ErrorCode::NonNumericCell);
    CHECK(error_code_of([&] { load_csv(dir.write("short.csv", "a,y\n1,2\n3\n"), "y"); }) ==
          ErrorCode::NonNumericCell);
    CHECK(error_code_of([&] { load_csv(dir.write("one.csv", "a,y\n1,2\n"), "y"); }) == ErrorCode::EmptyDataset);
    CHECK(error_code_of([&] { load_csv(dir.write("empty.csv", ""), "y"); }) == ErrorCode::EmptyDataset);
    CHECK(error_code_of([&] { load_csv(dir.write("only_y.csv", "y\n1\n2\n"), "y"); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("Dataset rejects malformed construction")
{
    CHECK(error_code_of([] { Dataset(Matrix(3, 2), std::vector<double>(2)); }) == ErrorCode::DimensionMismatch);
    CHECK(error_code_of([] { Dataset(Matrix(1, 2), std::vector<double>(1)); }) == ErrorCode::EmptyDataset);
    Matrix x(2, 1);
    x(0, 0) = std::nan("");
    CHECK(error_code_of([&] { Dataset(x, std::vector<double>(2)); }) == ErrorCode::NonNumericCell);
}

TEST_CASE("CSV round trip is exact at 17 digits")
{
    testing::TempDir dir("csv_roundtrip");
    const auto d = synth_generate("friedman1", 50, 6, 1.0, 11);
    write_csv(d, dir.path / "rt.csv");
    const auto back = load_csv(dir.path / "rt.csv", d.target_name());
    CHECK(back == d);
}

TEST_CASE("train_test_split sizes and disjointness")
{
    const auto d = synth_generate("linear", 10, 2, 0.0, 1);
    const auto s = train_test_split(d, 0.2, 7);
    CHECK(s.train.n() == 8);
    CHECK(s.test.n() == 2);

    std::vector<std::size_t> all = s.train_rows;
    all.insert(all.end(), s.test_rows.begin(), s.test_rows.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(all[i] == i);

    for (std::size_t i = 0; i < s.test_rows.size(); ++i)
        CHECK(s.test.targets()[i] == d.targets()[s.test_rows[i]]);

    const auto again = train_test_split(d, 0.2, 7);
    CHECK(again.train_rows == s.train_rows);
    CHECK(again.test_rows == s.test_rows);
    CHECK(train_test_split(d, 0.2, 8).test_rows != s.test_rows);
}

TEST_CASE("split of an Abalone-sized set rounds the test size up")
{
    // ceil(4177 * 0.2) = ceil(835.4) = 836
    const auto [train, test] = split_indices(4177, 0.2, 0);
    CHECK(test.size() == 836);
    CHECK(train.size() == 3341);
}

TEST_CASE("split property: any fraction and seed partitions the rows")
{
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(300);
        const double frac = rng.uniform(0.01, 0.99);
        const std::size_t expect = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * frac));
        if (expect >= n) {
            CHECK(error_code_of([&] { split_indices(n, frac, trial); }) == ErrorCode::TooFewRows);
            continue;
        }
        auto [train, test] = split_indices(n, frac, trial);
        CHECK(test.size() == expect);
        train.insert(train.end(), test.begin(), test.end());
        std::sort(train.begin(), train.end());
        CHECK(std::adjacent_find(train.begin(), train.end()) == train.end());
        CHECK(train.size() == n);
        CHECK(train.back() == n - 1);
    }
}

TEST_CASE("split errors")
{
    const auto d = synth_generate("linear", 10, 2, 0.0, 1);
    CHECK(error_code_of([&] { train_test_split(d, 0.0, 1); }) == ErrorCode::InvalidFraction);
    CHECK(error_code_of([&] { train_test_split(d, 1.0, 1); }) == ErrorCode::InvalidFraction);
    CHECK(error_code_of([&] { train_test_split(d, std::nan(""), 1); }) == ErrorCode::InvalidFraction);
    CHECK(error_code_of([&] { train_test_split(d, 0.95, 1); }) == ErrorCode::TooFewRows);
}

TEST_CASE("standardize a single column by hand")
{
    const Matrix x{{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}};
    const auto s = standardize_fit(x);
    const auto z = s.apply(x);
    // population std of [1,2,3] is sqrt(2/3); 1/sqrt(2/3) = 1.224744871...
    CHECK(z(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(z(1, 0) == doctest::Approx(0.0));
    CHECK(z(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
    CHECK(s.std_devs[1] == 1.0);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(z(r, 1) == 0.0);
    CHECK(error_code_of([&] { s.apply(Matrix(2, 3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("standardization yields zero mean, unit std and is idempotent")
{
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x(40, 4);
        for (std::size_t r = 0; r < 40; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                x(r, c) = rng.uniform(-100.0, 300.0) * static_cast<double>(c + 1);
        const auto z = standardize_fit(x).apply(x);
        const auto again = standardize_fit(z);
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(std::abs(again.means[c]) < 1e-9);
            CHECK(std::abs(again.std_devs[c] - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("standardize_apply keeps targets and names")
{
    const auto d = synth_generate("linear", 20, 3, 0.1, 2);
    const auto z = standardize_apply(standardize_fit(d), d);
    CHECK(z.targets() == d.targets());
    CHECK(z.feature_names() == d.feature_names());
}

TEST_CASE("synthetic generators")
{
    SUBCASE("deterministic")
    {
        for (const char* kind : {"linear", "friedman1", "piecewise"})
            CHECK(synth_generate(kind, 30, 4, 0.5, 9) == synth_generate(kind, 30, 4, 0.5, 9));
        CHECK(!(synth_generate("linear", 30, 4, 0.5, 9) == synth_generate("linear", 30, 4, 0.5, 10)));
    }
    SUBCASE("noise-free linear follows its closed form")
    {
        const auto d = synth_generate("linear", 100, 3, 0.0, 1);
        const auto truth = synth_linear_truth(3);
        for (std::size_t r = 0; r < d.n(); ++r) {
            double y = truth.intercept;
            for (std::size_t j = 0; j < 3; ++j)
                y += truth.weights[j] * d.features()(r, j);
            CHECK(d.targets()[r] == doctest::Approx(y).epsilon(1e-14));
        }
    }
    SUBCASE("piecewise stays within its declared range")
    {
        const auto d = synth_generate("piecewise", 200, 2, 0.1, 3);
        const auto [lo, hi] = synth_piecewise_range(2, 0.1);
        for (double y : d.targets()) {
            CHECK(std::isfinite(y));
            CHECK(y >= lo);
            CHECK(y <= hi);
        }
    }
    SUBCASE("features lie in the unit cube")
    {
        const auto d = synth_generate("friedman1", 100, 7, 1.0, 4);
        for (double v : d.features().data()) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
    }
    SUBCASE("errors")
    {
        CHECK(error_code_of([] { synth_generate("spiral", 10, 2, 0.0, 1); }) == ErrorCode::UnknownKind);
        CHECK(error_code_of([] { synth_generate("linear", 3, 2, 0.0, 1); }) == ErrorCode::TooFewRows);
    }
}

TEST_CASE("noise-free linear data is recovered by least squares")
{
    const auto d = synth_generate("linear", 100, 3, 0.0, 1);
    const auto model = fit(LearnerSpec{LearnerKind::LR, {}, 0}, d);
    const auto& lm = std::get<LinearModel>(model.state());
    const auto truth = synth_linear_truth(3);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(lm.coefficients[j] == doctest::Approx(truth.weights[j]).epsilon(1e-6));
    CHECK(lm.intercept == doctest::Approx(truth.intercept).epsilon(1e-6));
}
