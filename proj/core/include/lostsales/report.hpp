#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "lostsales/bounds.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/dp.hpp"
#include "lostsales/lindley.hpp"
#include "lostsales/policy.hpp"
#include "lostsales/sim.hpp"

namespace lostsales {

/// {pmf hash, label, unit, c, h, L, T, seed}; absent fields are omitted.
nlohmann::json instance_fingerprint(const DemandDistribution& d, double c, double h,
                                    std::optional<std::int64_t> L = std::nullopt,
                                    std::optional<std::int64_t> T = std::nullopt,
                                    std::optional<std::uint64_t> seed = std::nullopt);

nlohmann::json describe(const DemandDistribution& d);

void to_json(nlohmann::json& j, const NewsvendorScalars& v);
void to_json(nlohmann::json& j, const SupremumSolution& v);
void to_json(nlohmann::json& j, const ArgmaxDistribution& v);
void to_json(nlohmann::json& j, const BoundCheck& v);
void to_json(nlohmann::json& j, const TailSuiteReport& v);
void to_json(nlohmann::json& j, const ZSearchResult& v);
void to_json(nlohmann::json& j, const CostSummary& v);
void to_json(nlohmann::json& j, const LongRunSummary& v);
void to_json(nlohmann::json& j, const WindowCost& v);
void to_json(nlohmann::json& j, const DPSolution& v);
void to_json(nlohmann::json& j, const PolicyEvaluation& v);
void to_json(nlohmann::json& j, const RatioResult& v);
void to_json(nlohmann::json& j, const ThresholdY& v);
void to_json(nlohmann::json& j, const Theorem1Certificate& v);
void to_json(nlohmann::json& j, const LowerBoundSolution& v);
void to_json(nlohmann::json& j, const Estimate& v);
void to_json(nlohmann::json& j, const CoupledEstimates& v);
void to_json(nlohmann::json& j, const GapReport& v);
void to_json(nlohmann::json& j, const InventoryCapReport& v);
void to_json(nlohmann::json& j, const RStarMarginReport& v);
void to_json(nlohmann::json& j, const SteinReport& v);
void to_json(nlohmann::json& j, const NormalConstantReport& v);
void to_json(nlohmann::json& j, const ConstantsReport& v);

}  // namespace lostsales
