// Acceptance runner: one [PASS]/[FAIL]/[SKIP] line per criterion.
//
//   acceptance            run every criterion
//   acceptance 05 10      run the listed ones
//
// Exit status: 0 when everything run passed, 1 on any failure, 77 when every
// criterion run was skipped for missing data.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fixtures.hpp"
#include "mlaudit/abduction.hpp"
#include "mlaudit/cluster.hpp"
#include "mlaudit/dataset.hpp"
#include "mlaudit/design_opt.hpp"
#include "mlaudit/explain.hpp"
#include "mlaudit/formulas.hpp"
#include "mlaudit/grid.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/model.hpp"
#include "mlaudit/rng.hpp"
#include "mlaudit/symreg.hpp"
#include "mlaudit/validation.hpp"
#include "oracles.hpp"

using json = nlohmann::json;
using namespace mlaudit;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kMetricRelTol = 1e-12;
constexpr double kAbramTarget = 0.724;
constexpr double kAbramTol = 0.10;
constexpr double kForestWcTarget = 0.66;
constexpr double kForestWcTol = 0.10;
constexpr double kForestAllMin = 0.90;
constexpr double kFireTrainTarget = 0.89;
constexpr double kFireTrainTol = 0.05;
constexpr double kFireTestTarget = 0.75;
constexpr double kFireTestTol = 0.08;
constexpr double kShapTol = 1e-6;
constexpr double kEpsilon = 0.05;
constexpr double kEq7MeanTarget = 0.98;
constexpr double kEq7CovTarget = 0.16;
constexpr double kEq7Tol = 0.03;
constexpr double kEq7Example = 2364.6;
constexpr double kEq7ExampleTol = 1e-9;
constexpr double kVolumeReference = 396940231.78;
constexpr double kVolumeRelTol = 1e-4;
constexpr double kTargetFr = 120.0;

constexpr std::uint64_t kSeed = 42;

enum class State { Pass, Fail, Skip };

struct Outcome {
    State state = State::Fail;
    std::string detail;
};

Outcome pass(std::string d) { return {State::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {State::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {State::Skip, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? State::Pass : State::Fail, std::move(d)}; }

std::string num(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol + 1e-12; }

fs::path data_path(const std::string& rel) { return fixtures::data_dir() / rel; }

Dataset concrete() { return load_dataset(data_path("concrete.csv"), load_schema(data_path("schemas/concrete.json"))); }

Dataset with_wc(const Dataset& d) {
    const auto water = d.column(d.require_feature("water"));
    const auto cement = d.column(d.require_feature("cement"));
    std::vector<double> wc(d.n_rows());
    for (std::size_t i = 0; i < wc.size(); ++i) {
        wc[i] = water[i] / cement[i];
    }
    return d.with_feature(FeatureSpec{"wc", "", FeatureKind::Continuous, {}}, wc);
}

// 28-day rows with fc <= 50 MPa, w/c as the only feature.
Dataset nsc_subset() {
    Dataset d = with_wc(concrete());
    const std::size_t age = d.require_feature("age");
    d = d.filter([&](const Dataset& ds, std::size_t i) { return ds.feature(i, age) == 28.0 && ds.target_value(i) <= 50.0; });
    return d.select_features({"wc"});
}

double abram_r2(const Dataset& nsc) {
    const auto y = nsc.targets();
    const auto wc = nsc.column(0);
    const auto k = formulas::AbramConstants::for_age(formulas::AbramAge::Day28);
    std::vector<double> pred(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        pred[i] = formulas::abrams_strength(wc[i], k);
    }
    return r_squared(y, pred);
}

ModelSpec forest() {
    ModelSpec s;
    s.seed = derive_seed(kSeed, "surrogate");
    return s;
}

std::optional<Dataset> rc_fire() {
    const auto p = data_path("rc_fire.csv");
    if (!fs::exists(p)) {
        return std::nullopt;
    }
    return load_dataset(p, load_schema(data_path("schemas/rc_fire.json")));
}

struct Cli {
    int code = -1;
    std::string out;
};

Cli cli(const std::string& args) {
    static fixtures::TempDir scratch;
    const auto out = scratch.path() / "stdout.json";
    const std::string cmd = std::string("'") + MLAUDIT_CLI_PATH + "' " + args + " --data-dir '" +
                            fixtures::data_dir().string() + "' >'" + out.string() + "' 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, fixtures::read_file(out)};
}

// ---------------------------------------------------------------------------

Outcome c01() {
    SplitMix64 rng(kSeed);
    double worst = 0.0;
    auto rel = [&](double a, double b) {
        const double r = std::abs(a - b) / std::max(1.0, std::abs(b));
        worst = std::max(worst, r);
    };
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.below(200);
        std::vector<double> a(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform(1, 100);
            p[i] = a[i] + rng.normal() * 10.0;
            if (p[i] <= 0.0) {
                p[i] = 0.5;
            }
        }
        rel(mae(a, p), oracle::mae(a, p));
        rel(rmse(a, p), oracle::rmse(a, p));
        rel(r_squared(a, p), oracle::r2(a, p));
        const auto rs = ratio_stats(a, p);
        const auto [m, cov] = oracle::ratio_stats(a, p);
        rel(rs.mean_ratio, m);
        rel(rs.cov, cov);
    }
    return verdict(worst <= kMetricRelTol, "max relative deviation " + num(worst, 3) + " over 1000 pairs");
}

Outcome c02() {
    const Dataset d = concrete();
    const auto h = health_check(d);
    const bool ok = d.n_rows() == 1030 && d.n_features() == 8 && h.all_pass() && h.obs_per_feature == 128.75;
    return verdict(ok, std::to_string(d.n_rows()) + "x" + std::to_string(d.n_features()) +
                           ", obs/feature " + num(h.obs_per_feature, 6) + ", flags " + (h.all_pass() ? "all pass" : "not all pass"));
}

Outcome c03() {
    const Dataset nsc = nsc_subset();
    const double r2 = abram_r2(nsc);
    return verdict(within(r2, kAbramTarget, kAbramTol),
                   "Abram R2 " + num(r2) + " on " + std::to_string(nsc.n_rows()) + " rows, want " + num(kAbramTarget) +
                       " +- " + num(kAbramTol));
}

Outcome c04() {
    const Dataset nsc = nsc_subset();
    const double base = abram_r2(nsc);
    GpConfig cfg;
    cfg.seed = derive_seed(kSeed, "symreg");
    const auto archive = gp_search(nsc, cfg);
    const auto X = nsc.feature_matrix();
    const auto y = nsc.targets();
    double best = -1e300;
    std::string expr;
    for (const auto& e : archive.entries()) {
        std::vector<double> pred(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            pred[i] = eval_expression(e.tree, X.row(i));
        }
        const double r2 = r_squared(y, pred);
        if (r2 > best) {
            best = r2;
            expr = expression_to_string(e.tree, nsc.feature_names());
        }
    }
    return verdict(best > base, "symbolic best R2 " + num(best) + " vs Abram " + num(base) + " [" + expr + "]");
}

Outcome c05() {
    Dataset wc = with_wc(concrete());
    const std::size_t age = wc.require_feature("age");
    wc = wc.filter([&](const Dataset& ds, std::size_t i) { return ds.feature(i, age) == 28.0; }).select_features({"wc"});
    const auto cv_wc = cross_validate(forest(), wc, 10, derive_seed(kSeed, "cv"));
    const auto cv_all = cross_validate(forest(), concrete(), 10, derive_seed(kSeed, "cv"));
    const bool ok_wc = within(cv_wc.test.r2, kForestWcTarget, kForestWcTol);
    const bool ok_all = cv_all.test.r2 >= kForestAllMin;
    return verdict(ok_wc && ok_all, "w/c only held-out R2 " + num(cv_wc.test.r2) + " (want " + num(kForestWcTarget) +
                                        " +- " + num(kForestWcTol) + ", " + (ok_wc ? "ok" : "out of band") +
                                        "), all features " + num(cv_all.test.r2) + " (want >= " + num(kForestAllMin) +
                                        ", " + (ok_all ? "ok" : "too low") + ")");
}

Outcome c06() {
    const auto d = rc_fire();
    if (!d) {
        return skip("data/rc_fire.csv not present");
    }
    const auto cv = cross_validate(forest(), *d, 10, derive_seed(kSeed, "cv"));
    const bool ok = within(cv.train.r2, kFireTrainTarget, kFireTrainTol) && within(cv.test.r2, kFireTestTarget, kFireTestTol);
    return verdict(ok, "train R2 " + num(cv.train.r2) + ", test R2 " + num(cv.test.r2));
}

Outcome c07() {
    SplitMix64 rng(kSeed);
    double worst_attr = 0.0;
    double worst_eff = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t p = 2 + rng.below(7);
        std::vector<double> coef(p);
        for (double& c : coef) {
            c = rng.uniform(-5, 5);
        }
        const double intercept = rng.uniform(-10, 10);
        Matrix bg(1 + rng.below(40), p);
        for (double& v : bg.data()) {
            v = rng.uniform(-3, 3);
        }
        BlackBox f;
        for (std::size_t j = 0; j < p; ++j) {
            f.features.push_back("x" + std::to_string(j));
        }
        f.predict = [&](const Matrix& X) {
            std::vector<double> out(X.rows(), intercept);
            for (std::size_t i = 0; i < X.rows(); ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    out[i] += coef[j] * X(i, j);
                }
            }
            return out;
        };
        f.background = bg;
        f.feature_std.assign(p, 1.0);
        std::vector<double> x(p);
        for (double& v : x) {
            v = rng.uniform(-4, 4);
        }
        ExplainConfig cfg;
        cfg.seed = derive_seed(kSeed, static_cast<std::uint64_t>(t));
        const auto a = kernel_shap(f, x, cfg);
        const auto means = [&] {
            std::vector<double> m(p, 0.0);
            for (std::size_t i = 0; i < bg.rows(); ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    m[j] += bg(i, j) / static_cast<double>(bg.rows());
                }
            }
            return m;
        }();
        double total = a.base_value.value();
        for (std::size_t j = 0; j < p; ++j) {
            worst_attr = std::max(worst_attr, std::abs(a.values[j] - coef[j] * (x[j] - means[j])));
            total += a.values[j];
        }
        const Matrix one(1, p, x);
        worst_eff = std::max(worst_eff, std::abs(total - f.predict(one)[0]));
    }
    return verdict(worst_attr <= kShapTol && worst_eff <= kShapTol,
                   "max |phi - coef*dev| " + num(worst_attr, 3) + ", max efficiency gap " + num(worst_eff, 3));
}

// Piecewise fixture: a tent in x0 (rising to 1.5, falling after) plus a mild
// linear x1 term. At x0 = 2 against a background at x0 = 0 the Shapley value
// of x0 is tent(2) - tent(0) = +1 while the local slope is -1.
double tent(double t) { return t < 1.5 ? t : 3.0 - t; }

BlackBox piecewise_box() {
    BlackBox f;
    f.features = {"x0", "x1"};
    f.predict = [](const Matrix& X) {
        std::vector<double> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            out[i] = tent(X(i, 0)) + 0.5 * X(i, 1);
        }
        return out;
    };
    f.background = Matrix(2, 2, std::vector<double>{0, -1, 0, 1});
    f.feature_std = {0.2, 1.0};
    return f;
}

Outcome c08() {
    // Linear fixtures: fitted linear models, 100 rows.
    const Dataset lin = fixtures::linear_dataset(200, {1.5, -2.0, 0.7, 3.0}, 4.0, kSeed, 0.3);
    const TrainedModel m = fit(ModelSpec{ModelKind::Linear, {}, kSeed}, lin);
    ExplainConfig cfg;
    cfg.seed = derive_seed(kSeed, "explain");
    std::size_t linear_count = 0;
    const Matrix X = lin.feature_matrix();
    for (std::size_t i = 0; i < 100; ++i) {
        const auto s = normalize_attribution(kernel_shap(m, X.row(i), cfg));
        const auto l = normalize_attribution(lime_explain(m, X.row(i), cfg));
        linear_count += rashomon_disagreement(s, l, kEpsilon).count;
    }

    // Brute-force check of the piecewise fixture before explaining it.
    const BlackBox f = piecewise_box();
    const std::vector<double> x{2.0, 1.0};
    const auto shap_exact = oracle::exact_shapley(
        [&](const std::vector<double>& r) { return f.predict(Matrix(1, 2, r))[0]; }, x,
        {{0, -1}, {0, 1}});
    double slope_sum = 0.0;
    int slope_n = 0;
    for (double h = -0.4; h <= 0.4 + 1e-12; h += 0.05) {
        if (std::abs(h) < 1e-12) {
            continue;
        }
        const double a = f.predict(Matrix(1, 2, std::vector<double>{x[0] + h, x[1]}))[0];
        slope_sum += (a - f.predict(Matrix(1, 2, x))[0]) / h;
        ++slope_n;
    }
    const double local_slope = slope_sum / slope_n;
    const bool fixture_ok = shap_exact[0] > kEpsilon && local_slope < -kEpsilon;

    const auto s = normalize_attribution(kernel_shap(f, x, cfg));
    const auto l = normalize_attribution(lime_explain(f, x, cfg));
    const auto rep = rashomon_disagreement(s, l, kEpsilon);
    return verdict(linear_count == 0 && fixture_ok && rep.count > 0,
                   "linear fixtures: " + std::to_string(linear_count) + " disagreements over 100 rows; piecewise fixture " +
                       (fixture_ok ? "verified" : "NOT verified") + " (exact phi0 " + num(shap_exact[0]) + ", slope " +
                       num(local_slope) + "), " + std::to_string(rep.count) + " disagreement(s)");
}

Outcome c09() {
    const auto p = data_path("cfst_axial.csv");
    if (fs::exists(p)) {
        const Dataset d = load_dataset(p, load_schema(data_path("schemas/cfst_axial.json")));
        std::vector<double> pred(d.n_rows());
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
            pred[i] = formulas::cfst_axial_capacity(
                {d.feature(i, 0), d.feature(i, 1), d.feature(i, 2), d.feature(i, 3), d.feature(i, 4)});
        }
        const auto rs = ratio_stats(d.targets(), pred);
        return verdict(within(rs.mean_ratio, kEq7MeanTarget, kEq7Tol) && within(rs.cov, kEq7CovTarget, kEq7Tol),
                       "mean ratio " + num(rs.mean_ratio) + ", cov " + num(rs.cov) + " over " +
                           std::to_string(d.n_rows()) + " tests");
    }
    const double v = formulas::cfst_axial_capacity({200, 5, 2000, 350, 40});
    return verdict(std::abs(v - kEq7Example) <= kEq7ExampleTol * kEq7Example,
                   "database absent, degraded form: capacity " + num(v, 10) + " kN vs " + num(kEq7Example, 10));
}

Outcome c10() {
    const auto def = cli("optimize --format json");
    const auto ex = cli("optimize --catalog exhaustive --format json");
    if (def.out.empty() || ex.out.empty()) {
        return fail("no CLI output (exit " + std::to_string(def.code) + "/" + std::to_string(ex.code) + ")");
    }
    const auto opt = json::parse(def.out).at("report").at("optimize");
    const auto catalog = load_section_catalog(data_path("catalog/chs_sections.csv"));
    const auto& top = opt.at("top_r");
    const double snapped = opt.at("snap").at("design").at("diameter").get<double>();
    const bool top_infeasible = !top.at("catalog_feasible").get<bool>();
    const bool resolved = catalog.contains_diameter(snapped);
    return verdict(def.code == 4 && top_infeasible && resolved && ex.code == 0,
                   "default catalog exit " + std::to_string(def.code) + ", top-R diameter " +
                       num(top.at("design").at("diameter").get<double>()) + " (catalog " +
                       (top_infeasible ? "infeasible" : "feasible") + "), snapped to " + num(snapped) +
                       "; exhaustive catalog exit " + std::to_string(ex.code));
}

Outcome c11() {
    const double v = formulas::cfst_volume(380, 3500);
    const double rel = std::abs(v - kVolumeReference) / kVolumeReference;
    return verdict(rel <= kVolumeRelTol, "volume " + num(v, 12) + " mm3, relative deviation " + num(rel, 3));
}

Outcome c12() {
    SplitMix64 rng(kSeed);
    std::size_t mismatches = 0;
    std::size_t largest = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = t == 99 ? 1000 : 1 + rng.below(1000);
        largest = std::max(largest, n);
        std::vector<ObjectivePoint> pts(n);
        std::vector<double> r(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            // half the sets are coarse so that ties occur
            r[i] = t % 2 == 0 ? rng.uniform(0, 300) : static_cast<double>(rng.below(30));
            v[i] = t % 2 == 0 ? rng.uniform(1e8, 1e9) : static_cast<double>(rng.below(30));
            pts[i] = {r[i], v[i]};
        }
        auto got = pareto_front(pts);
        std::sort(got.begin(), got.end());
        mismatches += got == oracle::brute_pareto(r, v) ? 0U : 1U;
    }
    return verdict(mismatches == 0,
                   std::to_string(mismatches) + " mismatching sets of 100 (largest n = " + std::to_string(largest) + ")");
}

Outcome c13() {
    fixtures::TempDir tmp;
    std::string source = "data/rc_fire.csv";
    fs::path csv = data_path("rc_fire.csv");
    if (!fs::exists(csv)) {
        csv = tmp.write("rc_fire.csv", fixtures::to_csv(fixtures::synthetic_rc_fire(140, kSeed)));
        source = "synthetic rc_fire-schema fixture (real data absent)";
    }
    const auto model = tmp.path() / "model.json";
    const auto train = cli("train --dataset '" + csv.string() + "' --schema rc_fire --model forest --model-out '" +
                           model.string() + "' --format none");
    if (train.code != 0) {
        return fail("train exited " + std::to_string(train.code));
    }
    const auto run = cli("abduce --model '" + model.string() + "' --target-fr 120 -n 100000 -k 5 --format json");
    if (run.code != 0 || run.out.empty()) {
        return fail("abduce exited " + std::to_string(run.code));
    }
    const auto ab = json::parse(run.out).at("report").at("abduction");
    const auto c = load_grid_constraints(data_path("constraints/rc_fire.json"));
    const auto features = c.features();
    bool ok = ab.at("screened") == 100000 && ab.at("top").size() == 5;
    double lowest = 1e300;
    for (const auto& row : ab.at("top")) {
        std::vector<double> values;
        for (const auto& f : features) {
            values.push_back(row.at("config").at(f).get<double>());
        }
        const double fr = row.at("predicted_fr").get<double>();
        lowest = std::min(lowest, fr);
        ok = ok && fr >= kTargetFr && on_lattice(c, values);
    }
    return verdict(ok, "top-5 of " + std::to_string(ab.at("screened").get<std::size_t>()) + " configs, lowest predicted FR " +
                           num(lowest) + ", lattice checks " + (ok ? "pass" : "fail") + "; model from " + source);
}

Outcome c14a() {
    const auto X = fixtures::blobs({{0, 0}, {8, 0}, {4, 7}}, 100, 1.0, kSeed);
    const auto s = select_k(X, 2, 10, derive_seed(kSeed, "cluster"));
    return verdict(s.k == 3, "3-blob fixture: selected k = " + std::to_string(s.k));
}

Outcome c14b() {
    const auto d = rc_fire();
    if (!d) {
        return skip("data/rc_fire.csv not present");
    }
    const auto s = select_k(d->feature_matrix(), 2, 10, derive_seed(kSeed, "cluster"));
    return verdict(s.k >= 3 && s.k <= 7, "rc_fire: selected k = " + std::to_string(s.k) + " (want 3..7)");
}

struct Criterion {
    std::string id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"01", "metric oracle equivalence", 1, c01},
        {"02", "concrete data health", 1, c02},
        {"03", "Abram baseline R2 band", 5, c03},
        {"04", "symbolic regression beats Abram", 60, c04},
        {"05", "forest surrogate R2", 60, c05},
        {"06", "fire surrogate R2", 10, c06},
        {"07", "kernel SHAP exact on linear models", 10, c07},
        {"08", "SHAP/LIME disagreement null and positive fixtures", 30, c08},
        {"09", "CFST axial capacity reference", 5, c09},
        {"10", "infeasible optimum paradox", 30, c10},
        {"11", "CFST volume cross-check", 1, c11},
        {"12", "Pareto front oracle", 5, c12},
        {"13", "abduction top-5 contract", 60, c13},
        {"14a", "cluster count on 3 blobs", 30, c14a},
        {"14b", "cluster count on rc_fire", 30, c14b},
    };
    return all;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<const Criterion*> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string want = argv[i];
        bool found = false;
        for (const auto& c : criteria()) {
            if (c.id == want || (want == "14" && c.id.rfind("14", 0) == 0)) {
                selected.push_back(&c);
                found = true;
            }
        }
        if (!found) {
            std::cerr << "acceptance: unknown criterion '" << want << "'\n";
            return 2;
        }
    }
    if (selected.empty()) {
        for (const auto& c : criteria()) {
            selected.push_back(&c);
        }
    }

    std::size_t failed = 0;
    std::size_t skipped = 0;
    for (const Criterion* c : selected) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c->run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.state == State::Pass && secs > c->budget_s) {
            o.state = State::Fail;
            o.detail += "; over the time budget";
        }
        const char* tag = o.state == State::Pass ? "[PASS]" : o.state == State::Fail ? "[FAIL]" : "[SKIP]";
        std::printf("%s %-3s %s: %s (%.2f s, budget %g s)\n", tag, c->id.c_str(), c->title.c_str(), o.detail.c_str(),
                    secs, c->budget_s);
        std::fflush(stdout);
        failed += o.state == State::Fail ? 1U : 0U;
        skipped += o.state == State::Skip ? 1U : 0U;
    }
    if (failed > 0) {
        return 1;
    }
    return skipped == selected.size() ? 77 : 0;
}
