#pragma once

#include <json.hpp>

#include "mitopt/mle.hpp"
#include "mitopt/solver.hpp"

// JSON records carry a "schema" tag so downstream readers can detect
// format changes. Current tags: mitopt.design/1, mitopt.mc/1.

namespace mitopt {

nlohmann::json to_json(const Design& d);
nlohmann::json to_json(const ConditionReport& c);
nlohmann::json design_report_json(const SolveReport& r, const Family& f, const ModelParams& p,
                                  const Bounds& b);
nlohmann::json mc_report_json(const CovarianceReport& r, const Family& f, const ModelParams& p,
                              const Design& d, const SimConfig& cfg);

}  // namespace mitopt
