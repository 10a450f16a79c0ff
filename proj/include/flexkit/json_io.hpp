#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "flexkit/centers.hpp"
#include "flexkit/feasibility.hpp"
#include "flexkit/flex.hpp"
#include "flexkit/model.hpp"
#include "flexkit/network.hpp"
#include "flexkit/sets.hpp"

namespace flexkit {

// Rounds to six significant digits; the value every report serializer
// applies to floating-point output so artifacts stay byte-stable.
double sig6(double v);

// ---- input files (all throw InputError on malformed content) ----

LinearSystem system_from_json(const nlohmann::json& j);
UncertaintySetSpec set_from_json(const nlohmann::json& j);
GaussianSpec dist_from_json(const nlohmann::json& j);
NetworkModel network_from_json(const nlohmann::json& j);

LinearSystem load_system(const std::string& path);
UncertaintySetSpec load_set(const std::string& path);
GaussianSpec load_dist(const std::string& path);
NetworkModel load_network(const std::string& path);

// ---- result serialization ----

// Tag of the set variant: ellipsoid, hyperbox, pnorm, cvar, halfspaces or
// intersection.
std::string set_type_name(const UncertaintySetSpec& spec);

// Normalized network emission; parsing the output reproduces the model.
nlohmann::json to_json(const NetworkModel& net);

// Re-loadable system emission (exact coefficients, no rounding).
nlohmann::json to_json(const LinearSystem& system);

// {F, set, active, weakly_active, theta_star, multipliers, stats, ...}
nlohmann::json to_json(const FlexSolution& sol, const LinearSystem& system);

// Array of rank levels plus the termination reason.
nlohmann::json to_json(const RankResult& result);

nlohmann::json to_json(const SFEstimate& est, double elapsed_seconds);

nlohmann::json to_json(const CenterResult& center, const LinearSystem& system);

nlohmann::json to_json(const VerificationReport& report);

nlohmann::json to_json(const ComponentRankMap& map);

// ---- CSV tables ----

// level,constraints,F,increase_pct - one row per rank level.
std::string rank_csv(const RankResult& result);

// design,F_box,F_ellip,alpha_star_pct,SF_pct with empty cells for absent
// analyses. box_col/ellip_col index into each row's per-set cells; pass -1
// for a column with no matching set.
std::string compare_csv(const std::vector<CompareRow>& rows, int box_col,
                        int ellip_col);

}  // namespace flexkit
