// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egostream/protocols.hpp"

namespace egostream {

std::string_view to_string(Mode mode);
std::string_view to_string(Trimming trimming);
std::string_view to_string(StrategyKind kind);
std::string_view to_string(DistanceMetric metric);
std::string_view to_string(DblReference reference);
std::string_view to_string(SamplingKind kind);
std::string_view to_string(AggregationInput input);
std::string_view to_string(SweepParameter param);

nlohmann::ordered_json to_json(const ProtocolSpec& spec);

/// Machine-readable report. Per-segment predictions and boundary events are
/// included when `detailed` is set.
nlohmann::ordered_json to_json(const EvalReport& report, bool detailed = true);

/// Aligned-column summary for terminals.
std::string to_text(const EvalReport& report);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);
nlohmann::ordered_json curve_to_json(const std::vector<CurvePoint>& curve);

/// One row per grid value: value, mean_all, mean_seen, mean_unseen, evaluated.
std::string sweep_to_csv(SweepParameter param, const std::vector<SweepPoint>& points);
nlohmann::ordered_json sweep_to_json(SweepParameter param, const std::vector<SweepPoint>& points);

/// Per-pair accuracies as CSV rows (train,test,evaluated,correct,accuracy).
std::string pairs_to_csv(const EvalReport& report);

}  // namespace egostream
