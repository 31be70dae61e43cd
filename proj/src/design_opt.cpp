// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/design_opt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlaudit/error.hpp"
#include "mlaudit/formulas.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, std::string("cannot open ") + what + " " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

GridRule rule_from(const json& j, const std::string& name) {
    if (j.is_number()) {
        return GridRule::enumerated(name, {j.get<double>()});
    }
    if (j.contains("values")) {
        return GridRule::enumerated(name, j.at("values").get<std::vector<double>>());
    }
    const auto bounds = j.at("range").get<std::vector<double>>();
    if (bounds.size() != 2) {
        fail(ErrorKind::Schema, "design space '" + name + "' range must have two values");
    }
    return GridRule::range(name, bounds[0], bounds[1], j.at("step").get<double>());
}

std::vector<std::string> labels_from(const json& j, const char* key, std::vector<std::string> fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    auto v = j.at(key).get<std::vector<std::string>>();
    if (v.empty()) {
        fail(ErrorKind::Schema, std::string("design space '") + key + "' is empty");
    }
    return v;
}

bool matches(const std::string& pattern, const std::string& value) { return pattern.empty() || pattern == value; }

} // namespace

double DesignSpace::factor_for(const CfstDesign& d) const {
    for (const auto& e : factors) {
        if (e.filling == d.filling && e.aggregate == d.aggregate && matches(e.steel_pct_class, d.steel_pct_class) &&
            matches(e.cover_class, d.cover_class)) {
            return e.f;
        }
    }
    fail(ErrorKind::Schema, "no f factor for filling '" + d.filling + "', aggregate '" + d.aggregate +
                                "', steel class '" + d.steel_pct_class + "', cover class '" + d.cover_class + "'");
}

DesignSpace parse_design_space(const std::string& json_text) {
    DesignSpace s;
    try {
        const json j = json::parse(json_text);
        s.fc = rule_from(j.at("fc"), "fc");
        s.diameter = rule_from(j.at("diameter"), "diameter");
        s.length = rule_from(j.at("length"), "length");
        s.kl = rule_from(j.at("kl"), "kl");
        s.c_load = rule_from(j.at("c_load"), "c_load");
        s.shapes = labels_from(j, "shape", s.shapes);
        s.fillings = labels_from(j, "filling", s.fillings);
        s.aggregates = labels_from(j, "aggregate", s.aggregates);
        s.steel_pct_classes = labels_from(j, "steel_pct_class", s.steel_pct_classes);
        s.cover_classes = labels_from(j, "cover_class", s.cover_classes);
        if (j.contains("f_table")) {
            s.factors.clear();
            for (const auto& e : j.at("f_table")) {
                FactorEntry f;
                f.filling = e.at("filling").get<std::string>();
                f.aggregate = e.at("aggregate").get<std::string>();
                f.steel_pct_class = e.value("steel_pct_class", std::string{});
                f.cover_class = e.value("cover_class", std::string{});
                f.f = e.at("f").get<double>();
                if (!(f.f > 0.0) || !std::isfinite(f.f)) {
                    fail(ErrorKind::Schema, "f factors must be positive");
                }
                s.factors.push_back(std::move(f));
            }
        }
        if (j.contains("min_fr")) {
            s.min_fr = j.at("min_fr").get<std::map<std::string, double>>();
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Schema, std::string("malformed design space: ") + e.what());
    }
    if (s.fc.lo() <= 0.0 || s.diameter.lo() <= 0.0 || s.length.lo() <= 0.0 || s.c_load.lo() <= 0.0) {
        fail(ErrorKind::Schema, "design space quantities must be positive");
    }
    if (s.kl.lo() <= 1000.0) {
        fail(ErrorKind::Schema, "design space kl must exceed 1000 mm");
    }
    // Every categorical combination needs a factor.
    CfstDesign probe;
    for (const auto& fill : s.fillings) {
        for (const auto& agg : s.aggregates) {
            for (const auto& st : s.steel_pct_classes) {
                for (const auto& cv : s.cover_classes) {
                    probe.filling = fill;
                    probe.aggregate = agg;
                    probe.steel_pct_class = st;
                    probe.cover_class = cv;
                    (void)s.factor_for(probe);
                }
            }
        }
    }
    return s;
}

DesignSpace load_design_space(const std::filesystem::path& path) {
    return parse_design_space(read_file(path, "design space"));
}

// ---------------------------------------------------------------------------

void SectionCatalog::validate() const {
    if (entries.empty()) {
        fail(ErrorKind::InvalidArgument, "section catalog is empty");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!names.insert(entries[i].designation).second) {
            fail(ErrorKind::Schema, "duplicate section designation '" + entries[i].designation + "'");
        }
        if (!(entries[i].diameter > 0.0)) {
            fail(ErrorKind::Schema, "section diameters must be positive");
        }
        if (i > 0 && !(entries[i].diameter > entries[i - 1].diameter)) {
            fail(ErrorKind::Schema, "section diameters must be strictly increasing");
        }
    }
}

bool SectionCatalog::contains_diameter(double d) const {
    return std::any_of(entries.begin(), entries.end(), [&](const Section& s) { return s.diameter == d; });
}

const Section& SectionCatalog::nearest(double d) const {
    validate();
    const Section* best = &entries.front();
    for (const auto& s : entries) {
        const double gap = std::abs(s.diameter - d);
        const double best_gap = std::abs(best->diameter - d);
        if (gap < best_gap || (gap == best_gap && s.diameter > best->diameter)) {
            best = &s;
        }
    }
    return *best;
}

SectionCatalog parse_section_catalog(const std::string& text) {
    SectionCatalog c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : s) {
            if (ch == sep) {
                out.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    };
    auto number = [&](const std::string& s, const std::string& column) {
        double v = 0.0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        while (b < e && *b == ' ') {
            ++b;
        }
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e || !std::isfinite(v)) {
            throw ParseError(line_no - 1, column, "catalog row " + std::to_string(line_no - 1) + ": bad number '" + s +
                                                      "' in column " + column);
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        auto cells = split(line, ',');
        if (header.empty()) {
            header = cells;
            if (header.size() < 2 || header[0] != "designation" || header[1] != "diameter_mm") {
                fail(ErrorKind::Schema, "catalog header must start with designation,diameter_mm");
            }
            continue;
        }
        if (cells.size() < 2) {
            fail(ErrorKind::Schema, "catalog row " + std::to_string(line_no - 1) + " has too few columns");
        }
        Section s;
        s.designation = cells[0];
        s.diameter = number(cells[1], "diameter_mm");
        if (cells.size() > 2 && !cells[2].empty()) {
            for (const auto& t : split(cells[2], ';')) {
                s.thicknesses.push_back(number(t, "thicknesses_mm"));
            }
        }
        c.entries.push_back(std::move(s));
    }
    c.validate();
    return c;
}

SectionCatalog load_section_catalog(const std::filesystem::path& path) {
    return parse_section_catalog(read_file(path, "section catalog"));
}

SectionCatalog exhaustive_catalog(const DesignSpace& space) {
    SectionCatalog c;
    for (std::size_t i = 0; i < space.diameter.size(); ++i) {
        const double d = space.diameter.value_at(i);
        std::ostringstream name;
        name << "D" << d;
        c.entries.push_back({name.str(), d, {}});
    }
    return c;
}

// ---------------------------------------------------------------------------

DesignEvaluation evaluate_design(const CfstDesign& d) {
    DesignEvaluation e;
    e.r = formulas::asce29_fire_resistance({d.f_factor, d.fc, d.kl, d.diameter, d.c_load});
    e.volume = formulas::cfst_volume(d.diameter, d.length);
    return e;
}

ConstraintCheck check_constraints(const CfstDesign& d, double r, double r_limit, const DesignSpace& space) {
    if (!(r_limit > 0.0)) {
        fail(ErrorKind::InvalidArgument, "r_limit must be positive");
    }
    ConstraintCheck c;
    c.r = r;
    c.required = r_limit;
    if (const auto it = space.min_fr.find(d.filling); it != space.min_fr.end()) {
        c.required = std::max(c.required, it->second);
    }
    c.margin = r - c.required;
    c.passed = r >= c.required;
    return c;
}

std::vector<std::size_t> pareto_front(const std::vector<ObjectivePoint>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].volume != points[b].volume) {
            return points[a].volume < points[b].volume;
        }
        if (points[a].r != points[b].r) {
            return points[a].r > points[b].r;
        }
        return a < b;
    });
    std::vector<std::size_t> front;
    double best_prev = -std::numeric_limits<double>::infinity();
    std::size_t g = 0;
    while (g < order.size()) {
        std::size_t end = g;
        while (end < order.size() && points[order[end]].volume == points[order[g]].volume) {
            ++end;
        }
        const double group_max = points[order[g]].r;  // sorted r descending within the group
        for (std::size_t k = g; k < end; ++k) {
            const double r = points[order[k]].r;
            if (r == group_max && r > best_prev) {
                front.push_back(order[k]);
            }
        }
        best_prev = std::max(best_prev, group_max);
        g = end;
    }
    return front;
}

// ---------------------------------------------------------------------------

OptimizeReport optimize_design(const DesignSpace& space, const SectionCatalog& catalog, double r_limit,
                               std::size_t budget, std::uint64_t seed) {
    require(budget >= 100, "optimize budget must be at least 100");
    if (!(r_limit > 0.0)) {
        fail(ErrorKind::InvalidArgument, "r_limit must be positive");
    }
    catalog.validate();
    OptimizeReport report;
    report.evaluated = budget;

    const std::uint64_t stream = derive_seed(seed, "design");
    std::set<std::vector<std::size_t>> seen;
    std::vector<CfstDesign> designs;
    for (std::size_t i = 0; i < budget; ++i) {
        SplitMix64 rng(derive_seed(stream, i));
        std::vector<std::size_t> key{
            static_cast<std::size_t>(rng.below(space.fc.size())),
            static_cast<std::size_t>(rng.below(space.diameter.size())),
            static_cast<std::size_t>(rng.below(space.length.size())),
            static_cast<std::size_t>(rng.below(space.kl.size())),
            static_cast<std::size_t>(rng.below(space.c_load.size())),
            static_cast<std::size_t>(rng.below(space.shapes.size())),
            static_cast<std::size_t>(rng.below(space.fillings.size())),
            static_cast<std::size_t>(rng.below(space.aggregates.size())),
            static_cast<std::size_t>(rng.below(space.steel_pct_classes.size())),
            static_cast<std::size_t>(rng.below(space.cover_classes.size())),
        };
        if (!seen.insert(key).second) {
            continue;
        }
        CfstDesign d;
        d.fc = space.fc.value_at(key[0]);
        d.diameter = space.diameter.value_at(key[1]);
        d.length = space.length.value_at(key[2]);
        d.kl = space.kl.value_at(key[3]);
        d.c_load = space.c_load.value_at(key[4]);
        d.shape = space.shapes[key[5]];
        d.filling = space.fillings[key[6]];
        d.aggregate = space.aggregates[key[7]];
        d.steel_pct_class = space.steel_pct_classes[key[8]];
        d.cover_class = space.cover_classes[key[9]];
        d.f_factor = space.factor_for(d);
        designs.push_back(std::move(d));
    }
    report.distinct = designs.size();

    std::vector<std::size_t> feasible;
    std::vector<ObjectivePoint> points;
    std::vector<DesignEvaluation> evals;
    for (std::size_t i = 0; i < designs.size(); ++i) {
        const DesignEvaluation e = evaluate_design(designs[i]);
        if (check_constraints(designs[i], e.r, r_limit, space).passed) {
            feasible.push_back(i);
            points.push_back({e.r, e.volume});
            evals.push_back(e);
        }
    }
    report.feasible = feasible.size();
    if (feasible.empty()) {
        report.status = "empty-result";
        return report;
    }
    for (std::size_t idx : pareto_front(points)) {
        OptResult r;
        r.design = designs[feasible[idx]];
        r.r = evals[idx].r;
        r.volume = evals[idx].volume;
        r.constraints_passed = true;
        r.catalog_feasible = catalog.contains_diameter(r.design.diameter);
        const Section& s = catalog.nearest(r.design.diameter);
        r.nearest_designation = s.designation;
        r.nearest_diameter = s.diameter;
        report.front.push_back(std::move(r));
    }
    std::size_t top = 0;
    for (std::size_t i = 1; i < report.front.size(); ++i) {
        if (report.front[i].r > report.front[top].r) {
            top = i;
        }
    }
    report.status = report.front[top].catalog_feasible ? "ok" : "paradox-detected";
    return report;
}

SnapReport snap_to_catalog(const CfstDesign& d, const SectionCatalog& catalog) {
    const Section& s = catalog.nearest(d.diameter);
    SnapReport out;
    out.before = evaluate_design(d);
    out.design = d;
    out.design.diameter = s.diameter;
    out.designation = s.designation;
    out.after = evaluate_design(out.design);
    out.delta_diameter = s.diameter - d.diameter;
    return out;
}

} // namespace mlaudit
