#pragma once

// JSON schemas for the public value types: Levy measures and symbols
// ({"drift": b, "measure": {"kind": ...}}), distribution specs as used by
// experiment configs, certification reports, and the compact step-path form
// {"horizon", "initial", "epochs", "values"}.

#include <string>

#include "ctrw/coupling.hpp"
#include "ctrw/distributions.hpp"
#include "ctrw/paths.hpp"
#include "ctrw/symbol.hpp"

#include "json.hpp"

namespace ctrw {

nlohmann::json to_json(const LevyMeasure& m);
LevyMeasure levy_measure_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BernsteinSymbol& s);
BernsteinSymbol bernstein_symbol_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CmReport& r);
nlohmann::json to_json(const InjectionBoundReport& r);

nlohmann::json to_json(const StepPath& p);
StepPath step_path_from_json(const nlohmann::json& j);

} // namespace ctrw
