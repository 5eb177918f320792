#include "rotorsim/math.hpp"

#include <cmath>

namespace rotorsim {

Mat3 hat(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Quat quat_exp(const Vec3& theta) {
  const double angle = theta.norm();
  if (angle < 1e-12) {
    // second-order series keeps the result unit-norm to machine precision
    Quat q(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
    q.normalize();
    return q;
  }
  const double half = 0.5 * angle;
  const Vec3 axis = theta / angle;
  const double s = std::sin(half);
  return Quat(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
}

Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(vn, q.w());
  return angle * v / vn;
}

Quat boxplus(const Quat& q, const Vec3& delta) { return (q * quat_exp(delta)).normalized(); }

Vec3 boxminus(const Quat& b, const Quat& a) { return quat_log(a.conjugate() * b); }

double angle_between(const Quat& a, const Quat& b) { return boxminus(b, a).norm(); }

bool all_finite(const Vec3& v) { return v.allFinite(); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rotorsim
