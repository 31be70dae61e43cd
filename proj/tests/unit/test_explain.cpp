#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/explain.hpp"
#include "mlaudit/model.hpp"
#include "mlaudit/rng.hpp"
#include "oracles.hpp"

using namespace mlaudit;

namespace {

Attribution attr(std::vector<double> v) {
    Attribution a;
    for (std::size_t i = 0; i < v.size(); ++i) {
        a.features.push_back("f" + std::to_string(i + 1));
    }
    a.values = std::move(v);
    a.normalized = true;
    return a;
}

BlackBox box(std::size_t p, std::function<double(std::span<const double>)> f, Matrix background) {
    BlackBox b;
    for (std::size_t j = 0; j < p; ++j) {
        b.features.push_back("x" + std::to_string(j));
    }
    b.predict = [f](const Matrix& X) {
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            out[i] = f(X.row(i));
        }
        return out;
    };
    b.background = std::move(background);
    b.feature_std.assign(p, 1.0);
    return b;
}

Matrix symmetric_background() { return Matrix(4, 2, std::vector<double>{-1, -1, 1, 1, 1, -1, -1, 1}); }

} // namespace

TEST_SUITE("explain") {

TEST_CASE("kernel shap on a linear function") {
    const auto f = box(2, [](auto x) { return 2 * x[0] + 3 * x[1]; }, symmetric_background());
    const std::vector<double> x{1, 1};
    const auto a = kernel_shap(f, x, {});
    CHECK(a.values[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(a.values[1] == doctest::Approx(3.0).epsilon(1e-9));
    REQUIRE(a.base_value.has_value());
    CHECK(*a.base_value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*a.base_value + a.values[0] + a.values[1] == doctest::Approx(5.0).epsilon(1e-12));

    const auto at_mean = kernel_shap(f, std::vector<double>{0, 0}, {});
    CHECK(std::fabs(at_mean.values[0]) < 1e-9);
    CHECK(std::fabs(at_mean.values[1]) < 1e-9);
}

TEST_CASE("kernel shap on a constant function") {
    const auto f = box(3, [](auto) { return 4.5; }, Matrix(5, 3, 0.3));
    const auto a = kernel_shap(f, std::vector<double>{1, 2, 3}, {});
    for (double v : a.values) {
        CHECK(std::fabs(v) < 1e-9);
    }
    CHECK(*a.base_value == doctest::Approx(4.5));
}

TEST_CASE("kernel shap equals exact Shapley values when coalitions are enumerated") {
    SplitMix64 rng(21);
    auto fn = [](std::span<const double> x) {
        return std::sin(x[0]) * x[1] + x[2] * x[2] - 0.5 * x[3] * x[0] + std::exp(0.3 * x[4]);
    };
    Matrix bg(12, 5);
    for (auto& v : bg.data()) {
        v = rng.uniform(-1, 1);
    }
    const auto f = box(5, fn, bg);
    oracle::Rows rows(bg.rows());
    for (std::size_t i = 0; i < bg.rows(); ++i) {
        rows[i].assign(bg.row(i).begin(), bg.row(i).end());
    }
    for (int t = 0; t < 10; ++t) {
        std::vector<double> x(5);
        for (auto& v : x) {
            v = rng.uniform(-2, 2);
        }
        const auto a = kernel_shap(f, x, {});
        const auto ref = oracle::exact_shapley([&](const std::vector<double>& z) { return fn(z); }, x, rows);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(a.values[j] == doctest::Approx(ref[j]).epsilon(1e-8));
        }
    }
}

TEST_CASE("local accuracy holds for sampled coalitions and fitted models") {
    const auto d = fixtures::synthetic_rc_fire(140, 8);
    const auto m = fit(ModelSpec{ModelKind::Forest, {{"n_trees", 30}}, 1}, d);
    const Matrix X = d.feature_matrix();
    ExplainConfig cfg;
    cfg.n_coalitions = 100;  // 2^8 - 2 = 254 coalitions, forces sampling
    for (std::size_t i = 0; i < 20; ++i) {
        const auto a = kernel_shap(m, X.row(i), cfg);
        double s = *a.base_value;
        for (double v : a.values) {
            s += v;
        }
        CHECK(s == doctest::Approx(m.predict_row(X.row(i))).epsilon(1e-6));
    }
}

TEST_CASE("kernel shap is deterministic and validates its config") {
    const auto d = fixtures::synthetic_rc_fire(60, 9);
    const auto m = fit(ModelSpec{ModelKind::Tree, {}, 1}, d);
    ExplainConfig cfg;
    cfg.n_coalitions = 50;
    const auto x = d.feature_matrix().row(3);
    CHECK(kernel_shap(m, x, cfg).values == kernel_shap(m, x, cfg).values);
    cfg.n_coalitions = 5;
    CHECK_THROWS_AS((void)kernel_shap(m, x, cfg), Error);
    const auto f = box(2, [](auto x) { return x[0]; }, Matrix());
    CHECK_THROWS_AS((void)kernel_shap(f, std::vector<double>{1, 1}, {}), Error);
}

TEST_CASE("lime on a linear function") {
    const auto f = box(2, [](auto x) { return 2 * x[0] + 3 * x[1]; }, symmetric_background());
    const auto a = lime_explain(f, std::vector<double>{0.5, -0.2}, {});
    REQUIRE(a.coefficients.size() == 2);
    CHECK(a.coefficients[0] > 0);
    CHECK(a.coefficients[1] > 0);
    CHECK(a.coefficients[0] / a.coefficients[1] == doctest::Approx(2.0 / 3.0).epsilon(0.1));
    CHECK_FALSE(a.base_value.has_value());
    CHECK(a.values[0] == doctest::Approx(a.coefficients[0] * 0.5).epsilon(1e-9));
    CHECK(lime_explain(f, std::vector<double>{0.5, -0.2}, {}).values == a.values);
}

TEST_CASE("lime on a constant function") {
    const auto f = box(3, [](auto) { return -2.0; }, Matrix(4, 3, 1.0));
    const auto a = lime_explain(f, std::vector<double>{0, 1, 2}, {});
    for (double c : a.coefficients) {
        CHECK(std::fabs(c) < 1e-6);
    }
    ExplainConfig cfg;
    cfg.lime_n_samples = 20;
    CHECK_THROWS_AS((void)lime_explain(f, std::vector<double>{0, 1, 2}, cfg), Error);
}

TEST_CASE("normalization") {
    const auto n = normalize_attribution(attr({2, -4}));
    CHECK(n.values == std::vector<double>{0.5, -1.0});
    CHECK(n.normalized);
    CHECK(normalize_attribution(attr({1})).values == std::vector<double>{1.0});
    try {
        (void)normalize_attribution(attr({0, 0}));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Degenerate);
    }
    SplitMix64 rng(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v(1 + rng.below(10));
        for (auto& x : v) {
            x = rng.normal() * 100;
        }
        const auto out = normalize_attribution(attr(v)).values;
        double peak = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(std::signbit(out[i]) == std::signbit(v[i]));
            CHECK(std::fabs(out[i]) <= 1.0);
            peak = std::max(peak, std::fabs(out[i]));
        }
        CHECK(peak == 1.0);
        const auto argmax = std::max_element(v.begin(), v.end()) - v.begin();
        CHECK(std::max_element(out.begin(), out.end()) - out.begin() == argmax);
    }
}

TEST_CASE("disagreement hand cases") {
    CHECK(rashomon_disagreement(attr({0.5, -0.3}), attr({0.5, -0.3})).count == 0);
    const auto r = rashomon_disagreement(attr({0.5, -0.3}), attr({0.4, 0.2}), 0.05);
    CHECK(r.count == 1);
    CHECK_FALSE(r.per_feature[0].opposed);
    CHECK(r.per_feature[1].opposed);
    CHECK(rashomon_disagreement(attr({0.01, -0.3}), attr({-0.01, -0.3}), 0.05).count == 0);
    CHECK_THROWS_AS((void)rashomon_disagreement(attr({1, 0}), attr({1})), Error);
}

TEST_CASE("disagreement is symmetric and consistent with its flags") {
    SplitMix64 rng(8);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> a(6);
        std::vector<double> b(6);
        for (std::size_t i = 0; i < 6; ++i) {
            a[i] = rng.uniform(-1, 1);
            b[i] = rng.uniform(-1, 1);
        }
        const auto ab = rashomon_disagreement(attr(a), attr(b));
        const auto ba = rashomon_disagreement(attr(b), attr(a));
        CHECK(ab.count == ba.count);
        std::size_t flags = 0;
        for (const auto& f : ab.per_feature) {
            if (f.opposed) {
                ++flags;
                CHECK(std::fabs(f.shap) > ab.epsilon);
                CHECK(std::fabs(f.lime) > ab.epsilon);
                CHECK((f.shap > 0) != (f.lime > 0));
            }
        }
        CHECK(flags == ab.count);
    }
}

TEST_CASE("physics consistency") {
    Attribution a;
    a.features = {"width_mm", "length_mm", "fc_mpa", "cover_mm", "ecc_mm"};
    a.values = {0.8, -0.5, 0.3, 0.6, -0.2};
    a.normalized = true;
    const PhysicsExpectation rc{{"length_mm", -1}, {"ecc_mm", -1}, {"cover_mm", 1}, {"width_mm", 1}, {"fc_mpa", 1}};
    CHECK(physics_consistency(a, rc).empty());

    a.values[4] = 0.4;
    const auto v = physics_consistency(a, rc);
    REQUIRE(v.size() == 1);
    CHECK(v[0].feature == "ecc_mm");
    CHECK(v[0].expected_sign == -1);

    const PhysicsExpectation none{{"length_mm", 0}, {"ecc_mm", 0}};
    CHECK(physics_consistency(a, none).empty());
    CHECK_THROWS_AS((void)physics_consistency(a, PhysicsExpectation{{"mystery", 1}}), Error);
}

TEST_CASE("shipped expectation file") {
    const auto e = load_physics_expectation(fixtures::data_dir() / "physics" / "rc_fire_expectations.json");
    CHECK(e.size() == 8);
    for (const auto& [name, sign] : e) {
        CHECK(sign >= -1);
        CHECK(sign <= 1);
    }
}

}
