// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlaudit::formulas {

enum class AbramAge { Day7, Day28 };

/// Abram's Law constants: strength = a / b^(w/c).
struct AbramConstants {
    double a = 96.55;
    double b = 8.2;
    AbramAge age = AbramAge::Day28;

    /// Default pairing: (63.45, 14) at 7 days, (96.55, 8.2) at 28 days.
    static AbramConstants for_age(AbramAge age);
    /// The other reading of the constant list: (63.45, 96.55) at 7 days,
    /// (14, 8.2) at 28 days. Kept selectable for comparison.
    static AbramConstants alternative_pairing(AbramAge age);
};

struct EulerColumn {
    double e_modulus = 0.0;  // MPa
    double inertia = 0.0;    // mm^4
    double k_factor = 1.0;
    double length = 0.0;     // mm
    std::optional<double> area;  // mm^2

    [[nodiscard]] double radius_of_gyration() const;
};

struct CfstAxialInput {
    double diameter = 0.0;   // mm
    double thickness = 0.0;  // mm
    double eff_length = 0.0; // mm
    double fy = 0.0;         // MPa
    double fc = 0.0;         // MPa
};

/// Fire resistance of a concrete-filled steel column. `c_load` is the applied
/// load in kN.
struct Asce29Input {
    double f_factor = 0.0;
    double fc = 0.0;        // MPa
    double kl = 0.0;        // mm
    double diameter = 0.0;  // mm
    double c_load = 0.0;    // kN
};

double abrams_strength(double wc, const AbramConstants& constants);
double sr_wc_strength(double wc);
double sr_mix28_strength(double slag, double fly_ash, double sp, double wc);
double sr_mix_age_strength(double coarse_agg, double wc, double age, double sp, double slag);

/// pi^2 E I / (K L)^2 in N. With `as_printed` the pi is not squared.
double euler_critical_load(const EulerColumn& col, bool as_printed = false);
double slenderness(const EulerColumn& col);

double cfst_axial_capacity(const CfstAxialInput& in);  // kN
double asce29_fire_resistance(const Asce29Input& in);  // minutes
double cfst_volume(double diameter, double length);     // mm^3, gross circular section

// ---------------------------------------------------------------------------
// Registry used by the `formula eval` command.

struct Symbol {
    std::string name;
    std::string unit;
    std::string meaning;
};

struct FormulaInfo {
    std::string id;
    std::string expression;
    std::string output_unit;
    std::vector<Symbol> parameters;
    std::vector<std::string> notes;
    std::function<double(const std::map<std::string, double>&)> evaluate;
};

const std::vector<FormulaInfo>& formula_registry();
const FormulaInfo& find_formula(const std::string& id);

} // namespace mlaudit::formulas
