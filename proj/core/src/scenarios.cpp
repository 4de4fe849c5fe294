#include "whisker/scenarios.hpp"

#include <cmath>

#include "whisker/error.hpp"

namespace whisker {

std::vector<std::string> scenario_names() { return {"cylinder", "rounded_rectangle", "octagon", "wall"}; }

OpenPolyline bent_wall() {
  struct Leg {
    double turn_deg;
    double length;
  };
  // Turn applied before walking the leg; left turns are convex.
  const std::vector<Leg> legs = {{0, 120},  {10, 20}, {10, 20}, {10, 20}, {10, 20}, {10, 20},
                                 {10, 60}, {-50, 80}, {70, 100}};
  OpenPolyline w;
  w.fillet_radius = 5.0;
  Vec2 p{-60.0, 0.0};
  double heading = 0.0;
  w.vertices.push_back(p);
  for (const auto& leg : legs) {
    heading += leg.turn_deg * kPi / 180.0;
    p += leg.length * Vec2{std::cos(heading), std::sin(heading)};
    w.vertices.push_back(p);
  }
  return w;
}

ScenarioConfig preset_scenario(std::string_view name) {
  ScenarioConfig s;
  s.name = std::string(name);
  s.tick_rate = 30.0;
  s.duration = 200.0;
  // Distance from the sensor origin (near the undeflected tip) to the surface.
  constexpr double kStandoff = 20.0;
  if (name == "cylinder") {
    s.contour.shape = Circle{80.0};
    s.start = Pose2D{0.0, -80.0 - kStandoff, kPi / 2};
  } else if (name == "rounded_rectangle") {
    s.contour.shape = RoundedRectangle{160.0, 160.0, 40.0};
    s.start = Pose2D{0.0, -80.0 - kStandoff, kPi / 2};
  } else if (name == "octagon") {
    const RoundedPolygon oct{8, 70.0, 30.0};
    s.contour.shape = oct;
    const double apothem = oct.side_length / (2.0 * std::tan(kPi / oct.sides));
    s.start = Pose2D{0.0, -apothem - kStandoff, kPi / 2};
  } else if (name == "wall") {
    s.contour.shape = bent_wall();
    s.start = Pose2D{-20.0, -kStandoff, kPi / 2};
  } else {
    throw Error(Errc::kConfig, "unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

}  // namespace whisker
