// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsl/common.hpp"
#include "qsl/costs.hpp"
#include "qsl/hardness.hpp"
#include "qsl/locality.hpp"
#include "qsl/trainer.hpp"

namespace qsl {

// JSON-lines record schemas shared between the library and the CLI.
// wall-clock fields are opt-in (see the CLI's --timings flag): default
// output streams must be byte-reproducible from (config, seed).

inline nlohmann::json cost_report_json(const CostReport& report,
                                       std::optional<double> wall_time_ms = std::nullopt) {
  nlohmann::json j{{"record", "cost"},
                   {"kind", report.kind},
                   {"value", report.value},
                   {"stderr", nullptr},
                   {"n_terms", report.n_terms},
                   {"params_hash", report.params_hash}};
  if (report.stderr_) j["stderr"] = *report.stderr_;
  if (wall_time_ms) j["wall_time_ms"] = *wall_time_ms;
  return j;
}

inline nlohmann::json train_iteration_json(const TrainTrace::Iteration& row,
                                           std::optional<double> wall_time_ms = std::nullopt) {
  nlohmann::json j{{"record", "iteration"},
                   {"iter", row.iter},
                   {"train_cost", row.train_cost},
                   {"test_cost", nullptr},
                   {"grad_norm", row.grad_norm}};
  if (row.test_cost) j["test_cost"] = *row.test_cost;
  if (wall_time_ms) j["wall_time_ms"] = *wall_time_ms;
  return j;
}

inline nlohmann::json train_footer_json(const TrainTrace& trace) {
  return nlohmann::json{{"record", "final"},
                        {"final_params", trace.final_params},
                        {"converged", trace.converged},
                        {"iterations", trace.iterations.size()}};
}

inline nlohmann::json distinguish_record_json(const DistinguishRecord& record,
                                              std::optional<double> bound = std::nullopt) {
  nlohmann::json j{{"record", "distinguish"},
                   {"n", record.n},
                   {"strategy", record.strategy_id},
                   {"twirl", record.twirl},
                   {"budget", record.budget},
                   {"trials", record.trials},
                   {"successes", record.successes},
                   {"success_rate", record.success_rate()},
                   {"seed", record.seed},
                   {"bound", nullptr}};
  if (bound) j["bound"] = *bound;
  return j;
}

inline nlohmann::json locality_entry_json(const LocalityProfile& profile, std::size_t index,
                                          double dt, int layers) {
  const auto& e = profile.entries.at(index);
  return nlohmann::json{{"record", "locality"}, {"n", profile.n},     {"dt", dt},
                        {"layers", layers},     {"site", profile.site}, {"k", e.k},
                        {"alpha", e.alpha}};
}

}  // namespace qsl
