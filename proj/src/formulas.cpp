// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/formulas.hpp"

#include <cmath>
#include <numbers>

#include "mlaudit/error.hpp"

namespace mlaudit::formulas {

namespace {

void positive(double v, const char* what) {
    if (!(v > 0.0)) {
        fail(ErrorKind::Domain, std::string(what) + " must be positive");
    }
}

void non_negative(double v, const char* what) {
    if (!(v >= 0.0)) {
        fail(ErrorKind::Domain, std::string(what) + " must be non-negative");
    }
}

} // namespace

AbramConstants AbramConstants::for_age(AbramAge age) {
    return age == AbramAge::Day7 ? AbramConstants{63.45, 14.0, age} : AbramConstants{96.55, 8.2, age};
}

AbramConstants AbramConstants::alternative_pairing(AbramAge age) {
    return age == AbramAge::Day7 ? AbramConstants{63.45, 96.55, age} : AbramConstants{14.0, 8.2, age};
}

double abrams_strength(double wc, const AbramConstants& c) {
    non_negative(wc, "water-cement ratio");
    positive(c.a, "Abram constant A");
    if (!(c.b > 1.0)) {
        fail(ErrorKind::Domain, "Abram constant B must exceed 1");
    }
    return c.a / std::pow(c.b, wc);
}

double sr_wc_strength(double wc) {
    non_negative(wc, "water-cement ratio");
    return 13.64 / std::pow(1.36, wc);
}

double sr_mix28_strength(double slag, double fly_ash, double sp, double wc) {
    non_negative(slag, "slag");
    non_negative(fly_ash, "fly ash");
    non_negative(sp, "superplasticizer");
    if (wc == 0.0) {
        fail(ErrorKind::Domain, "sr_mix28: water-cement ratio of zero divides by zero");
    }
    positive(wc, "water-cement ratio");
    return std::abs(std::sqrt(slag) - 6.13 * std::exp(-fly_ash - std::sqrt(sp)) - 27.56 + 49.73 / std::sqrt(wc));
}

double sr_mix_age_strength(double coarse_agg, double wc, double age, double sp, double slag) {
    positive(coarse_agg, "coarse aggregate");
    positive(wc, "water-cement ratio (log(wc) subterm)");
    positive(age, "age");
    non_negative(sp, "superplasticizer");
    non_negative(slag, "slag");
    const double inner = slag - std::pow(std::log(wc), 6.0);
    const double denominator = std::pow(age, 9.0) * (sp + inner * inner);
    if (denominator == 0.0) {
        fail(ErrorKind::Domain, "sr_mix_age: denominator age^9 * (sp + (slag - log(wc)^6)^2) is zero");
    }
    const double argument = coarse_agg * std::pow(wc, 27.0) / denominator;
    if (!(argument > 0.0) || !std::isfinite(argument)) {
        fail(ErrorKind::Domain, "sr_mix_age: outer log argument is not a positive finite number");
    }
    return std::abs(std::log(argument));
}

double EulerColumn::radius_of_gyration() const {
    if (!area || !(*area > 0.0)) {
        fail(ErrorKind::Domain, "radius of gyration needs a positive cross-section area");
    }
    return std::sqrt(inertia / *area);
}

double euler_critical_load(const EulerColumn& col, bool as_printed) {
    positive(col.e_modulus, "E");
    positive(col.inertia, "I");
    positive(col.k_factor, "K");
    positive(col.length, "L");
    const double kl = col.k_factor * col.length;
    const double pi_term = as_printed ? std::numbers::pi : std::numbers::pi * std::numbers::pi;
    return pi_term * col.e_modulus * col.inertia / (kl * kl);
}

double slenderness(const EulerColumn& col) {
    positive(col.k_factor, "K");
    positive(col.length, "L");
    positive(col.inertia, "I");
    return col.k_factor * col.length / col.radius_of_gyration();
}

double cfst_axial_capacity(const CfstAxialInput& in) {
    positive(in.diameter, "D");
    positive(in.thickness, "t");
    positive(in.eff_length, "Le");
    positive(in.fy, "fy");
    positive(in.fc, "fc");
    if (!(in.thickness < in.diameter / 2.0)) {
        fail(ErrorKind::Domain, "tube thickness must be below D/2");
    }
    const double d = in.diameter;
    const double t = in.thickness;
    const double le = in.eff_length;
    return std::abs(0.00439 * d * t * in.fy + 0.000727 * t * d * d + 0.000727 * in.fc * d * d -
                    1.38e-5 * d * le * in.fc - 3.71e-7 * d * t * le * in.fy);
}

double asce29_fire_resistance(const Asce29Input& in) {
    if (!(in.kl > 1000.0)) {
        fail(ErrorKind::Domain, "ASCE 29: KL must exceed 1000 mm");
    }
    non_negative(in.f_factor, "f");
    positive(in.diameter, "D");
    positive(in.c_load, "C");
    return in.f_factor * (in.fc + 20.0) / (60.0 * (in.kl - 1000.0)) * in.diameter * in.diameter *
           std::sqrt(in.diameter / in.c_load);
}

double cfst_volume(double diameter, double length) {
    positive(diameter, "D");
    positive(length, "L");
    return std::numbers::pi / 4.0 * diameter * diameter * length;
}

// ---------------------------------------------------------------------------

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) {
        fail(ErrorKind::InvalidArgument, "missing parameter '" + key + "'");
    }
    return it->second;
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

std::vector<FormulaInfo> build_registry() {
    std::vector<FormulaInfo> r;
    r.push_back({"abrams", "fc = A / B^(w/c)", "MPa",
                 {{"wc", "-", "water-cement ratio by weight"},
                  {"age", "days", "7 or 28 (selects the constant pair; default 28)"},
                  {"pairing", "-", "0 = (63.45,14)/(96.55,8.2) [default], 1 = alternative reading"}},
                 {"constants (A, B): 7-day (63.45, 14), 28-day (96.55, 8.2)"},
                 [](const auto& p) {
                     const auto age = param_or(p, "age", 28.0) == 7.0 ? AbramAge::Day7 : AbramAge::Day28;
                     const auto c = param_or(p, "pairing", 0.0) != 0.0 ? AbramConstants::alternative_pairing(age)
                                                                        : AbramConstants::for_age(age);
                     return abrams_strength(param(p, "wc"), c);
                 }});
    r.push_back({"sr_wc", "fc = 13.64 / 1.36^(w/c)", "MPa", {{"wc", "-", "water-cement ratio by weight"}},
                 {"constants used as given; magnitudes are low for common w/c values"},
                 [](const auto& p) { return sr_wc_strength(param(p, "wc")); }});
    r.push_back({"sr_mix28", "|sqrt(B) - 6.13 exp(-F - sqrt(S)) - 27.56 + 49.73/sqrt(w/c)|", "MPa",
                 {{"slag", "kg/m3", "blast furnace slag B"},
                  {"fly_ash", "kg/m3", "fly ash F"},
                  {"sp", "kg/m3", "superplasticizer S"},
                  {"wc", "-", "water-cement ratio"}},
                 {"28-day strength expression"},
                 [](const auto& p) {
                     return sr_mix28_strength(param(p, "slag"), param(p, "fly_ash"), param(p, "sp"), param(p, "wc"));
                 }});
    r.push_back({"sr_mix_age", "|log(CA (w/c)^27 / (A^9 (S + (B - log(w/c)^6)^2)))|", "MPa",
                 {{"coarse_agg", "kg/m3", "coarse aggregate CA"},
                  {"wc", "-", "water-cement ratio"},
                  {"age", "days", "age A"},
                  {"sp", "kg/m3", "superplasticizer S"},
                  {"slag", "kg/m3", "blast furnace slag B"}},
                 {"natural logarithms; log(w/c)^6 is (log(w/c))^6"},
                 [](const auto& p) {
                     return sr_mix_age_strength(param(p, "coarse_agg"), param(p, "wc"), param(p, "age"), param(p, "sp"),
                                         param(p, "slag"));
                 }});
    r.push_back({"euler", "Pcr = pi^2 E I / (K L)^2", "N",
                 {{"E", "MPa", "Young's modulus"},
                  {"I", "mm4", "minimum second moment of area"},
                  {"K", "-", "effective length factor"},
                  {"L", "mm", "unsupported length"},
                  {"as_printed", "-", "1 evaluates pi E I/(K L)^2 (unsquared pi)"}},
                 {"default squares pi as in classical elastic buckling"},
                 [](const auto& p) {
                     EulerColumn c{param(p, "E"), param(p, "I"), param(p, "K"), param(p, "L"), std::nullopt};
                     return euler_critical_load(c, param_or(p, "as_printed", 0.0) != 0.0);
                 }});
    r.push_back({"slenderness", "lambda = K L / sqrt(I / Ar)", "-",
                 {{"I", "mm4", "second moment of area"},
                  {"K", "-", "effective length factor"},
                  {"L", "mm", "length"},
                  {"Ar", "mm2", "cross-section area"}},
                 {},
                 [](const auto& p) {
                     EulerColumn c{1.0, param(p, "I"), param(p, "K"), param(p, "L"), param(p, "Ar")};
                     return slenderness(c);
                 }});
    r.push_back({"cfst_axial",
                 "|0.00439 D t fy + 0.000727 t D^2 + 0.000727 fc D^2 - 1.38e-5 D Le fc - 3.71e-7 D t Le fy|", "kN",
                 {{"D", "mm", "tube diameter"},
                  {"t", "mm", "tube thickness"},
                  {"Le", "mm", "effective length"},
                  {"fy", "MPa", "steel yield strength"},
                  {"fc", "MPa", "concrete compressive strength"}},
                 {"circular sections under concentric load"},
                 [](const auto& p) {
                     return cfst_axial_capacity(
                         {param(p, "D"), param(p, "t"), param(p, "Le"), param(p, "fy"), param(p, "fc")});
                 }});
    r.push_back({"asce29", "R = f (fc + 20) / (60 (KL - 1000)) D^2 sqrt(D / C)", "min",
                 {{"f", "-", "filling/aggregate factor"},
                  {"fc", "MPa", "concrete compressive strength"},
                  {"kl", "mm", "effective length K L"},
                  {"D", "mm", "outside diameter"},
                  {"C", "kN", "applied load (interpretation: C is the axial load in kN)"}},
                 {"valid for KL > 1000 mm"},
                 [](const auto& p) {
                     return asce29_fire_resistance(
                         {param(p, "f"), param(p, "fc"), param(p, "kl"), param(p, "D"), param(p, "C")});
                 }});
    r.push_back({"cfst_volume", "V = pi/4 D^2 L", "mm3",
                 {{"D", "mm", "outside diameter"}, {"L", "mm", "member length"}},
                 {"gross circular section; steel/concrete split not modelled"},
                 [](const auto& p) { return cfst_volume(param(p, "D"), param(p, "L")); }});
    return r;
}

} // namespace

const std::vector<FormulaInfo>& formula_registry() {
    static const std::vector<FormulaInfo> registry = build_registry();
    return registry;
}

const FormulaInfo& find_formula(const std::string& id) {
    for (const auto& f : formula_registry()) {
        if (f.id == id) {
            return f;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown formula '" + id + "'");
}

} // namespace mlaudit::formulas
