// Minimal 3-vector and SU(2) rotation algebra.
//
// Two-level propagators are represented as unit quaternions (w, v) standing
// for U = w*I - i (v . sigma).  Quaternion products compose in the same order
// as the corresponding 2x2 matrix products, all entries stay real, and
// Re Tr(U)/2 is simply w.  This keeps long pulse-sequence products exact,
// branch-free and allocation-free.
#pragma once

#include <cmath>
#include <vector>

namespace spinctrl {

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(double s, const Vec3& a) {
    return {s * a.x, s * a.y, s * a.z};
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 1.0};
  }
};

// ---------------------------------------------------------------------------
// Axis-angle rotation (public value type)
// ---------------------------------------------------------------------------

/// Rotation by `angle` (radians, [0, 2pi] as an SU(2) element) about the unit
/// vector `axis`.  Angle 0 is the identity regardless of axis.
struct AxisAngleRotation {
  Vec3 axis{0.0, 0.0, 1.0};
  double angle = 0.0;
};

// ---------------------------------------------------------------------------
// Rotation: unit quaternion form used for all composition work
// ---------------------------------------------------------------------------

struct Rotation {
  double w = 1.0;  // cos(angle/2)
  Vec3 v{};        // sin(angle/2) * axis

  static Rotation identity() { return {}; }

  /// Rotation by `angle` about the (not necessarily unit) direction `axis`.
  static Rotation about_axis(const Vec3& axis, double angle) {
    const Vec3 n = axis.normalized();
    const double h = 0.5 * angle;
    return {std::cos(h), std::sin(h) * n};
  }

  /// Propagator exp(-i (omega . sigma) t / 2): rotation by |omega| t about
  /// omega.  A zero field gives the identity.
  static Rotation from_field(const Vec3& omega, double t) {
    const double mag = omega.norm();
    if (mag == 0.0) return identity();
    const double h = 0.5 * mag * t;
    const double s = std::sin(h) / mag;
    return {std::cos(h), s * omega};
  }

  static Rotation from_axis_angle(const AxisAngleRotation& r) {
    return about_axis(r.axis, r.angle);
  }

  /// Matrix-product composition: (a * b) applies b first, then a.
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return {a.w * b.w - a.v.dot(b.v),
            {a.w * b.v.x + b.w * a.v.x + a.v.y * b.v.z - a.v.z * b.v.y,
             a.w * b.v.y + b.w * a.v.y + a.v.z * b.v.x - a.v.x * b.v.z,
             a.w * b.v.z + b.w * a.v.z + a.v.x * b.v.y - a.v.y * b.v.x}};
  }

  /// Inverse rotation (matrix adjoint).
  Rotation conjugated() const { return {w, {-v.x, -v.y, -v.z}}; }

  /// Rotation angle in [0, 2pi].
  double angle() const { return 2.0 * std::atan2(v.norm(), w); }

  /// Unit rotation axis; +z for (near-)identity rotations.
  Vec3 axis() const { return v.normalized(); }

  /// Same axis, k times the angle (exact integer or fractional power).
  Rotation pow(double k) const {
    const double s = v.norm();
    if (s == 0.0) return identity();
    const double h = k * std::atan2(s, w);
    const double f = std::sin(h) / s;
    return {std::cos(h), f * v};
  }

  /// Renormalize against floating-point drift in long products.
  Rotation normalized() const {
    const double n = std::sqrt(w * w + v.dot(v));
    return {w / n, {v.x / n, v.y / n, v.z / n}};
  }

  AxisAngleRotation to_axis_angle() const { return {axis(), angle()}; }
};

/// Re Tr(U0 * U1^dagger) / 2 for two SU(2) elements; the per-spin coherence
/// factor of an electron prepared and read out along x.
inline double coherence_factor(const Rotation& u0, const Rotation& u1) {
  return u0.w * u1.w + u0.v.dot(u1.v);
}

/// Net rotation of an ordered list (first element applied first).
AxisAngleRotation compose_rotations(const std::vector<AxisAngleRotation>& rs);

}  // namespace spinctrl
