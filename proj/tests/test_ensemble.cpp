#include "helpers.hpp"

#include "ensreg/ensemble.hpp"
#include "ensreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ensreg;
using testing::error_code_of;

namespace {

std::vector<LearnerSpec> small_pool(std::uint64_t seed)
{
    return {
        {LearnerKind::LR, {}, seed},
        {LearnerKind::KNN, {{"k", 3}}, seed},
        {LearnerKind::SGD, {{"epochs", 30}}, seed},
        {LearnerKind::RF, {{"n_trees", 10}}, seed},
    };
}

std::vector<std::size_t> identity_rows(std::size_t n, std::uint64_t)
{
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

void check_within_members(const EnsembleModel& model, const Matrix& x)
{
    const auto members = model.member_predictions(x);
    const auto out = model.predict(x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& p : members) {
            lo = std::min(lo, p[r]);
            hi = std::max(hi, p[r]);
        }
        const double slack = 1e-12 * std::max(1.0, std::abs(hi) + std::abs(lo));
        CHECK(out[r] >= lo - slack);
        CHECK(out[r] <= hi + slack);
    }
}

} // namespace

TEST_CASE("convexity of uniform, rrmse and dwr predictions")
{
    const char* kinds[] = {"linear", "friedman1", "piecewise"};
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
        const auto d = synth_generate(kinds[trial % 3], 80, 2 + trial % 4, 0.5, trial);
        const auto split = train_test_split(d, 0.25, trial);
        for (auto source : {WeightSource::Train, WeightSource::Holdout}) {
            EnsembleConfig config;
            config.weight_source = source;
            config.seed = trial;
            const auto pool = small_pool(trial);
            check_within_members(fit_voting(pool, split.train, Strategy::Uniform, config), split.test.features());
            check_within_members(fit_voting(pool, split.train, Strategy::Rrmse, config), split.test.features());
            check_within_members(fit_dwr(pool, split.train, 5, config), split.test.features());
            check_within_members(fit_voting(pool, split.train, Strategy::Bem, config), split.test.features());
        }
    }
}

TEST_CASE("a single-member pool reproduces the member")
{
    const auto d = synth_generate("friedman1", 60, 3, 1.0, 2);
    const auto split = train_test_split(d, 0.2, 1);
    for (const auto& spec : small_pool(4)) {
        const std::vector<LearnerSpec> pool{spec};
        const auto member = fit(spec, split.train).predict(split.test.features());
        CHECK(fit_voting(pool, split.train, Strategy::Uniform).predict(split.test.features()) == member);
        CHECK(fit_voting(pool, split.train, Strategy::Rrmse).predict(split.test.features()) == member);
        CHECK(fit_voting(pool, split.train, Strategy::Bem).predict(split.test.features()) == member);
        CHECK(fit_dwr(pool, split.train, 3).predict(split.test.features()) == member);
        const auto gem = fit_voting(pool, split.train, Strategy::Gem).predict(split.test.features());
        for (std::size_t r = 0; r < gem.size(); ++r)
            CHECK(gem[r] == doctest::Approx(member[r]).epsilon(1e-12));
    }
}

TEST_CASE("uniform voting is the arithmetic mean of members")
{
    const auto d = synth_generate("piecewise", 100, 4, 0.2, 5);
    const auto split = train_test_split(d, 0.2, 5);
    const auto model = fit_voting(small_pool(1), split.train, Strategy::Uniform);
    const auto members = model.member_predictions(split.test.features());
    const auto out = predict_voting(model, split.test.features());
    for (std::size_t r = 0; r < out.size(); ++r) {
        double mean = 0.0;
        for (const auto& p : members)
            mean += p[r];
        mean /= static_cast<double>(members.size());
        CHECK(std::abs(out[r] - mean) <= 1e-12);
    }
}

TEST_CASE("rrmse weights are the normalized inverse member errors")
{
    const auto d = synth_generate("friedman1", 120, 4, 0.5, 9);
    EnsembleConfig config;
    config.weight_source = WeightSource::Train;
    const auto model = fit_voting(small_pool(2), d, Strategy::Rrmse, config);
    const auto& profile = *model.error_profile();
    const auto members = model.member_predictions(d.features());
    CHECK(profile.constant == zero_division_constant(d.targets()));
    double total = 0.0;
    for (double e : profile.errors)
        total += 1.0 / e;
    for (std::size_t i = 0; i < members.size(); ++i) {
        CHECK(profile.errors[i] == doctest::Approx(rrmse_alg1(d.targets(), members[i], profile.constant)));
        CHECK((*model.static_weights())[i] == doctest::Approx(1.0 / profile.errors[i] / total).epsilon(1e-12));
    }
}

TEST_CASE("holdout weights differ from in-sample weights")
{
    const auto d = synth_generate("friedman1", 150, 5, 1.0, 3);
    EnsembleConfig train_cfg;
    train_cfg.weight_source = WeightSource::Train;
    EnsembleConfig holdout_cfg;
    const auto a = fit_voting(small_pool(2), d, Strategy::Rrmse, train_cfg);
    const auto b = fit_voting(small_pool(2), d, Strategy::Rrmse, holdout_cfg);
    // The forest memorizes its training rows, so in-sample scoring favors it.
    CHECK((*a.static_weights())[3] > (*b.static_weights())[3]);
    // The final pool is fit on all of train in both cases.
    CHECK(a.member_predictions(d.features()) == b.member_predictions(d.features()));
}

TEST_CASE("bagging with identity resampling equals uniform voting")
{
    const auto d = synth_generate("linear", 60, 3, 0.5, 2);
    const auto split = train_test_split(d, 0.2, 3);
    const auto pool = small_pool(6);
    const auto bagged = fit_bagging(pool, split.train, 1, 11, {}, identity_rows);
    CHECK(bagged.member_count() == 4);
    const auto voted = fit_voting(pool, split.train, Strategy::Uniform);
    const auto a = predict_bagging(bagged, split.test.features());
    const auto b = voted.predict(split.test.features());
    for (std::size_t r = 0; r < a.size(); ++r)
        CHECK(a[r] == doctest::Approx(b[r]).epsilon(1e-12));
}

TEST_CASE("bagging pool composition cycles the specs")
{
    const auto d = synth_generate("piecewise", 50, 2, 0.1, 2);
    const auto model = fit_bagging(small_pool(0), d, 3, 5);
    REQUIRE(model.member_count() == 12);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(model.bags()[i].learner.spec().kind == small_pool(0)[i % 4].kind);
    const auto again = fit_bagging(small_pool(0), d, 3, 5);
    CHECK(again.predict(d.features()) == model.predict(d.features()));
    CHECK(fit_bagging(small_pool(0), d, 3, 6).predict(d.features()) != model.predict(d.features()));

    const auto rows = bootstrap_rows(100, 4);
    CHECK(rows.size() == 100);
    CHECK(*std::max_element(rows.begin(), rows.end()) < 100);
    CHECK(rows == bootstrap_rows(100, 4));
}

TEST_CASE("prune stage filters the pool before training")
{
    const auto d = synth_generate("linear", 40, 2, 0.1, 1);
    EnsembleConfig config;
    config.prune = [](const std::vector<LearnerSpec>& specs) {
        std::vector<LearnerSpec> kept;
        for (const auto& s : specs)
            if (s.kind != LearnerKind::RF)
                kept.push_back(s);
        return kept;
    };
    CHECK(fit_voting(small_pool(0), d, Strategy::Uniform, config).member_count() == 3);
    config.prune = [](const std::vector<LearnerSpec>&) { return std::vector<LearnerSpec>{}; };
    CHECK(error_code_of([&] { fit_voting(small_pool(0), d, Strategy::Uniform, config); }) == ErrorCode::EmptyPool);
}

TEST_CASE("DWR with a store-sized neighborhood degenerates to global weights")
{
    const auto d = synth_generate("friedman1", 100, 4, 1.0, 12);
    const auto split = train_test_split(d, 0.2, 2);
    EnsembleConfig config;
    config.weight_source = WeightSource::Train;
    const auto model = fit_dwr(small_pool(3), split.train, split.train.n(), config);

    const auto& store = *model.neighbor_store();
    std::vector<double> global_mae;
    for (const auto& e : store.abs_errors)
        global_mae.push_back(std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size()));
    const auto global = inverse_error_weights(global_mae);

    for (const auto& w : model.dwr_query_weights(split.test.features()))
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(std::abs(w[i] - global[i]) <= 1e-9);
}

TEST_CASE("GEM ensembles may carry signed weights")
{
    const auto d = synth_generate("friedman1", 120, 4, 0.5, 4);
    EnsembleConfig config;
    config.weight_source = WeightSource::Train;
    const auto model = fit_voting(small_pool(2), d, Strategy::Gem, config);
    const auto& w = *model.static_weights();
    CHECK(w.may_be_negative);
    CHECK(std::accumulate(w.weights.begin(), w.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ensemble errors")
{
    const auto d = synth_generate("linear", 40, 2, 0.1, 1);
    CHECK(error_code_of([&] { fit_voting({}, d, Strategy::Uniform); }) == ErrorCode::EmptyPool);
    CHECK(error_code_of([&] { fit_voting(small_pool(0), d, Strategy::Dwr); }) == ErrorCode::InvalidArgument);
    const auto model = fit_voting(small_pool(0), d, Strategy::Uniform);
    CHECK(error_code_of([&] { model.predict(Matrix(2, 5)); }) == ErrorCode::DimensionMismatch);
    CHECK(error_code_of([&] { predict_dwr(model, d.features()); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([&] { predict_bagging(model, d.features()); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { weight_source_from_string("test"); }) == ErrorCode::ConfigError);
}

TEST_CASE("ensembles are deterministic across thread counts")
{
    const auto d = synth_generate("friedman1", 80, 3, 1.0, 6);
    EnsembleConfig one;
    one.threads = 1;
    EnsembleConfig four;
    four.threads = 4;
    CHECK(fit_voting(small_pool(1), d, Strategy::Rrmse, one).predict(d.features()) ==
          fit_voting(small_pool(1), d, Strategy::Rrmse, four).predict(d.features()));
    CHECK(fit_bagging(small_pool(1), d, 2, 3, one).predict(d.features()) ==
          fit_bagging(small_pool(1), d, 2, 3, four).predict(d.features()));
}
