#include "spinctrl/geometry.hpp"

namespace spinctrl {

AxisAngleRotation compose_rotations(const std::vector<AxisAngleRotation>& rs) {
  Rotation q = Rotation::identity();
  for (const AxisAngleRotation& r : rs) q = Rotation::from_axis_angle(r) * q;
  return q.normalized().to_axis_angle();
}

}  // namespace spinctrl
