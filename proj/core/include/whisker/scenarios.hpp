#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "whisker/sim_harness.hpp"

namespace whisker {

/// "cylinder", "rounded_rectangle", "octagon", "wall".
std::vector<std::string> scenario_names();

/// Preset follow scenario; the sensor starts outside the object facing it.
/// Throws Error(kConfig) for unknown names.
ScenarioConfig preset_scenario(std::string_view name);

/// Open wall with a slow convex bend, a sharp concave corner and a sharp
/// convex corner (5 mm fillets); solid on the left of +X travel.
OpenPolyline bent_wall();

}  // namespace whisker
