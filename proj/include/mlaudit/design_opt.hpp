// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlaudit/grid.hpp"

namespace mlaudit {

struct CfstDesign {
    double fc = 0.0;        // MPa
    double diameter = 0.0;  // mm
    double length = 0.0;    // mm
    double kl = 0.0;        // mm
    std::string shape = "circular";
    std::string filling = "plain";
    std::string aggregate = "silicate";
    std::string steel_pct_class;
    std::string cover_class;
    double f_factor = 0.0;
    double c_load = 0.0;    // kN

    friend bool operator==(const CfstDesign&, const CfstDesign&) = default;
};

struct FactorEntry {
    std::string filling;
    std::string aggregate;
    std::string steel_pct_class;  // empty matches any
    std::string cover_class;      // empty matches any
    double f = 0.0;
};

/// Search space for the fire-resistance / volume trade-off.
struct DesignSpace {
    GridRule fc = GridRule::enumerated("fc", {35});
    GridRule diameter = GridRule::range("diameter", 200, 600, 10);
    GridRule length = GridRule::enumerated("length", {3500});
    GridRule kl = GridRule::enumerated("kl", {1100});
    GridRule c_load = GridRule::enumerated("c_load", {175});
    std::vector<std::string> shapes{"circular"};
    std::vector<std::string> fillings{"plain"};
    std::vector<std::string> aggregates{"silicate"};
    std::vector<std::string> steel_pct_classes{""};
    std::vector<std::string> cover_classes{""};
    std::vector<FactorEntry> factors{{"plain", "silicate", "", "", 0.07}};
    std::map<std::string, double> min_fr;  // per filling; missing fillings have no extra minimum

    /// First matching factor-table entry. Throws when none matches.
    [[nodiscard]] double factor_for(const CfstDesign& d) const;
};

DesignSpace load_design_space(const std::filesystem::path& path);
DesignSpace parse_design_space(const std::string& json_text);

struct Section {
    std::string designation;
    double diameter = 0.0;
    std::vector<double> thicknesses;
};

struct SectionCatalog {
    std::vector<Section> entries;  // strictly increasing diameter

    void validate() const;
    [[nodiscard]] bool contains_diameter(double d) const;
    /// Nearest diameter; equidistant ties go to the larger section.
    [[nodiscard]] const Section& nearest(double d) const;
};

/// CSV with header designation,diameter_mm,thicknesses_mm (thicknesses separated by ';').
SectionCatalog load_section_catalog(const std::filesystem::path& path);
SectionCatalog parse_section_catalog(const std::string& text);
/// A catalog holding every diameter of the space's lattice.
SectionCatalog exhaustive_catalog(const DesignSpace& space);

struct DesignEvaluation {
    double r = 0.0;       // minutes
    double volume = 0.0;  // mm^3
};

DesignEvaluation evaluate_design(const CfstDesign& d);

struct ConstraintCheck {
    bool passed = false;
    double r = 0.0;
    double required = 0.0;  // max(r_limit, filling minimum)
    double margin = 0.0;    // r - required
};

ConstraintCheck check_constraints(const CfstDesign& d, double r, double r_limit, const DesignSpace& space);

struct ObjectivePoint {
    double r = 0.0;
    double volume = 0.0;
};

/// Indices of points not dominated under (maximize r, minimize volume),
/// ordered by volume ascending (then r descending, then index).
std::vector<std::size_t> pareto_front(const std::vector<ObjectivePoint>& points);

struct OptResult {
    CfstDesign design;
    double r = 0.0;
    double volume = 0.0;
    bool constraints_passed = false;
    bool catalog_feasible = false;
    std::string nearest_designation;
    double nearest_diameter = 0.0;
};

struct OptimizeReport {
    std::string status;  // "ok", "paradox-detected" or "empty-result"
    std::vector<OptResult> front;  // volume ascending
    std::size_t evaluated = 0;
    std::size_t distinct = 0;
    std::size_t feasible = 0;
};

/// Seeded random search over the space (no catalog snapping), constraint
/// filter, Pareto reduction and catalog annotation. Status is
/// "paradox-detected" when the front's highest-R member is not a catalog size.
/// Candidate i depends only on (seed, i).
OptimizeReport optimize_design(const DesignSpace& space, const SectionCatalog& catalog, double r_limit,
                               std::size_t budget, std::uint64_t seed);

struct SnapReport {
    CfstDesign design;
    std::string designation;
    DesignEvaluation before;
    DesignEvaluation after;
    double delta_diameter = 0.0;  // after - before
};

SnapReport snap_to_catalog(const CfstDesign& d, const SectionCatalog& catalog);

} // namespace mlaudit
