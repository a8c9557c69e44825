#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "search.hpp"

namespace macroplan {

// JSON run record emitted next to every plan file.
inline nlohmann::json run_record_json(const SearchResult& r, HeuristicKind heuristic,
                                      std::optional<double> support_used = std::nullopt) {
  nlohmann::json j;
  j["status"] = std::string(to_string(r.status));
  if (r.plan) {
    j["plan_length"] = r.plan->steps.size();
    j["cost"] = r.plan->cost;
  } else {
    j["plan_length"] = nullptr;
    j["cost"] = nullptr;
  }
  j["expanded"] = r.expanded;
  j["generated"] = r.generated;
  j["macro_applications"] = r.macro_applications;
  j["wall_time_s"] = r.wall_time_s;
  j["heuristic"] = std::string(to_string(heuristic));
  if (support_used)
    j["support_used"] = *support_used;
  else
    j["support_used"] = nullptr;
  return j;
}

}  // namespace macroplan
