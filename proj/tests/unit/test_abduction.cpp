#include <doctest.h>

#include <cmath>
#include <tuple>

#include "fixtures.hpp"
#include "mlaudit/abduction.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/grid.hpp"
#include "mlaudit/model.hpp"

using namespace mlaudit;

namespace {

GridConstraintSet rc_constraints() {
    return load_grid_constraints(fixtures::data_dir() / "constraints" / "rc_fire.json");
}

const TrainedModel& rc_model() {
    static const TrainedModel m = [] {
        ModelSpec spec;
        spec.hyperparams["n_trees"] = 40;
        return fit(spec, fixtures::synthetic_rc_fire(200, 5));
    }();
    return m;
}

} // namespace

TEST_SUITE("grid") {

TEST_CASE("range and enumerated rules") {
    const auto r = GridRule::range("w", 200, 600, 1);
    CHECK(r.size() == 401);
    CHECK(r.value_at(0) == 200);
    CHECK(r.value_at(400) == 600);
    CHECK(r.index_of(350) == 150);
    CHECK_FALSE(r.index_of(350.5).has_value());
    CHECK_FALSE(r.index_of(601).has_value());
    CHECK(r.snap(350.5) == 150);  // tie goes to the lower index
    CHECK(r.snap(1e9) == 400);
    CHECK(r.snap(-1e9) == 0);

    const auto one = GridRule::range("a", 10, 10, 1);
    CHECK(one.size() == 1);
    CHECK(one.value_at(0) == 10);

    const auto fine = GridRule::range("f", 0, 1, 0.1);
    CHECK(fine.size() == 11);
    CHECK(fine.index_of(fine.value_at(3)) == 3);

    const auto e = GridRule::enumerated("s", {3, 1, 2});
    CHECK(e.values() == std::vector<double>{1, 2, 3});
    CHECK(e.snap(2.6) == 2);
    CHECK_FALSE(e.index_of(2.5).has_value());

    CHECK_THROWS_AS(GridRule::range("x", 5, 1, 1), Error);
    CHECK_THROWS_AS(GridRule::range("x", 0, 10, 0), Error);
    CHECK_THROWS_AS(GridRule::range("x", 0, 10, 3), Error);
    CHECK_THROWS_AS(GridRule::enumerated("x", {}), Error);
    CHECK_THROWS_AS((void)r.value_at(401), Error);
}

TEST_CASE("constraint documents") {
    const auto c = rc_constraints();
    CHECK(c.rules.size() == 8);
    CHECK(c.rule("steel_ratio_pct").values() == std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS((void)c.rule("nope"), Error);
    CHECK_THROWS_AS(parse_grid_constraints(R"({"rules": []})"), Error);
    CHECK_THROWS_AS(parse_grid_constraints(R"({"rules": [{"feature": "a", "range": [1], "step": 1}]})"), Error);
    CHECK_THROWS_AS(parse_grid_constraints(R"({"rules": [{"feature": "a", "values": [1]}, {"feature": "a", "values": [2]}]})"),
                    Error);
    CHECK_THROWS_AS(load_grid_constraints("/nonexistent/c.json"), Error);
}

TEST_CASE("sampled configs sit exactly on the lattice") {
    const auto c = rc_constraints();
    const auto configs = sample_configs(c, 5000, 11);
    REQUIRE(configs.size() == 5000);
    for (const auto& cfg : configs) {
        REQUIRE(is_valid_config(c, cfg));
        REQUIRE(on_lattice(c, cfg.values));
        CHECK(cfg.values[0] == std::floor(cfg.values[0]));
        CHECK(std::fmod(cfg.values[6], 5.0) == 0.0);
    }
    CHECK(sample_configs(c, 0, 11).empty());

    auto bad = configs.front();
    bad.values[0] += 0.5;
    CHECK_FALSE(is_valid_config(c, bad));
    CHECK_FALSE(on_lattice(c, bad.values));
    bad = configs.front();
    bad.index[1] = 4;
    CHECK_FALSE(is_valid_config(c, bad));
}

TEST_CASE("sampling is prefix stable and seeded") {
    const auto c = rc_constraints();
    const auto small = sample_configs(c, 10, 3);
    const auto large = sample_configs(c, 1000, 3);
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(small[i].index == large[i].index);
    }
    const auto other = sample_configs(c, 10, 4);
    std::size_t same = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        same += other[i].index == small[i].index ? 1 : 0;
    }
    CHECK(same < 10);
}

TEST_CASE("sampling covers every enumerated value") {
    const auto c = rc_constraints();
    const auto configs = sample_configs(c, 2000, 1);
    std::vector<int> seen(4, 0);
    for (const auto& cfg : configs) {
        ++seen[cfg.index[1]];
    }
    for (int s : seen) {
        CHECK(s > 400);
        CHECK(s < 600);
    }
}

}

TEST_SUITE("abduction") {

TEST_CASE("feasibility score") {
    CHECK(feasibility_score(120, 120) == 0.0);
    CHECK(feasibility_score(300, 120) == 1.0);
    CHECK(feasibility_score(400, 120) == 1.0);
    CHECK(feasibility_score(210, 120) == doctest::Approx(0.5));
    CHECK(feasibility_score(119.9, 120) == 0.0);
    CHECK(feasibility_score(150, 100, 200) == doctest::Approx(0.5));
    double prev = -1.0;
    for (double p = 0; p <= 400; p += 0.5) {
        const double s = feasibility_score(p, 120);
        CHECK(s >= prev);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        prev = s;
    }
    CHECK_THROWS_AS((void)feasibility_score(100, 120, 120), Error);
    CHECK_THROWS_AS((void)feasibility_score(100, 120, 100), Error);
}

TEST_CASE("screening order is a strict total order") {
    const auto c = rc_constraints();
    const auto configs = sample_configs(c, 3000, 21);
    const auto results = screen_configs(rc_model(), c, configs, 120.0);
    REQUIRE(results.size() == configs.size());
    auto key = [](const ScreenResult& r) {
        return std::make_tuple(!r.meets_target, -r.feasibility, r.config.values[7], r.config.values[0], r.source_index);
    };
    std::vector<bool> seen(configs.size(), false);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        CHECK(r.meets_target == (r.predicted_fr >= 120.0));
        CHECK(r.feasibility == feasibility_score(r.predicted_fr, 120.0));
        CHECK(r.config.index == configs[r.source_index].index);
        CHECK(r.predicted_fr == rc_model().predict_row(r.config.values));
        CHECK_FALSE(seen[r.source_index]);
        seen[r.source_index] = true;
        if (i > 0) {
            CHECK(key(results[i - 1]) < key(r));
        }
    }
}

TEST_CASE("top-k report") {
    const auto c = rc_constraints();
    const auto configs = sample_configs(c, 2000, 22);
    const auto results = screen_configs(rc_model(), c, configs, 90.0);
    ExplainConfig ecfg;
    ecfg.n_coalitions = 256;
    const auto top5 = top_k_report(results, 5, rc_model(), ecfg);
    CHECK(top5.status == "ok");
    REQUIRE(top5.rows.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(top5.rows[i].meets_target);
        CHECK(top5.rows[i].source_index == results[i].source_index);
    }
    REQUIRE(top5.best_attribution.has_value());
    const auto& a = *top5.best_attribution;
    double sum = a.base_value.value();
    for (double v : a.values) {
        sum += v;
    }
    CHECK(sum == doctest::Approx(top5.rows[0].predicted_fr).epsilon(1e-6));

    const auto top1 = top_k_report(results, 1, rc_model(), ecfg);
    REQUIRE(top1.rows.size() == 1);
    CHECK(top1.rows[0].source_index == top5.rows[0].source_index);
}

TEST_CASE("unreachable target gives an empty result") {
    const auto c = rc_constraints();
    const auto configs = sample_configs(c, 500, 23);
    const double target = rc_model().target_max() + 1.0;
    const auto results = screen_configs(rc_model(), c, configs, target, ScreenOptions{target + 100});
    for (const auto& r : results) {
        CHECK_FALSE(r.meets_target);
        CHECK(r.feasibility == 0.0);
    }
    const auto report = top_k_report(results, 5, rc_model(), ExplainConfig{});
    CHECK(report.status == "empty-result");
    CHECK(report.rows.empty());
    CHECK_FALSE(report.best_attribution.has_value());
}

TEST_CASE("model and constraint features must agree") {
    const auto c = rc_constraints();
    const auto other = fit(ModelSpec{ModelKind::Linear, {}, 1}, fixtures::linear_dataset(50, {1, 2}, 0, 1));
    try {
        (void)screen_configs(other, c, sample_configs(c, 5, 1), 120.0);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
    }
}

}
