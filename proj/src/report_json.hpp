// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

// JSON and CSV renderings of library results, shared by the command runner
// and the C API.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mlaudit/abduction.hpp"
#include "mlaudit/cluster.hpp"
#include "mlaudit/dataset.hpp"
#include "mlaudit/design_opt.hpp"
#include "mlaudit/explain.hpp"
#include "mlaudit/matrix.hpp"
#include "mlaudit/metrics.hpp"
#include "mlaudit/model.hpp"
#include "mlaudit/symreg.hpp"
#include "mlaudit/validation.hpp"

namespace mlaudit::detail {

using nlohmann::json;

json to_json(const Matrix& m);
json to_json(const HealthReport& h);
json to_json(const AssociationReport& a);
json to_json(const MetricReport& m);
json to_json(const MetricSummary& s);
json to_json(const CVReport& r);
json to_json(const Attribution& a);
json to_json(const DisagreementReport& r);
json to_json(const std::vector<PhysicsViolation>& v);
json to_json(const ModelSpec& s);
json to_json(const CfstDesign& d);
json to_json(const OptResult& r);
json to_json(const SnapReport& r);
json to_json(const KSelection& s);
json to_json(const ClusterCharacterization& c);

ModelSpec model_spec_from(const json& j, std::uint64_t default_seed);

std::string format_number(double v);

/// Minimal CSV builder; cells containing separators or quotes are quoted.
class Table {
public:
    explicit Table(std::vector<std::string> header);
    Table& row(std::vector<std::string> cells);
    [[nodiscard]] std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace mlaudit::detail
