#include "amap/geometry.hpp"

#include "amap/error.hpp"

namespace amap {

double wrap_angle(double a) {
  if (!std::isfinite(a)) throw Error(ErrorCode::NonFinite, "angle is not finite");
  if (a > -kPi && a <= kPi) return a;
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

}  // namespace amap
