#pragma once
/// Static SVG rendering of scenarios and executed traces.

#include <string>
#include <vector>

#include "pgs/scenario.hpp"
#include "pgs/simulate.hpp"

namespace pgs {

/// Scene figure: lanes, ego and agent footprints, expert trajectory, and
/// (when given) the executed path from a trace.
std::string render_svg(const ScenarioSpec& scenario,
                       const std::vector<StepTrace>* trace = nullptr);

}  // namespace pgs
