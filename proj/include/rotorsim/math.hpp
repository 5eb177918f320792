#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>

namespace rotorsim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kDefaultGravity = 9.81;

/// Skew-symmetric matrix such that hat(a) * b == a.cross(b).
Mat3 hat(const Vec3& a);

/// Inverse of hat(); reads the off-diagonal entries without checking skew symmetry.
Vec3 vee(const Mat3& m);

/// Exponential map R^3 -> unit quaternion (rotation vector convention).
Quat quat_exp(const Vec3& theta);

/// Logarithm unit quaternion -> rotation vector, with |theta| <= pi.
Vec3 quat_log(const Quat& q);

/// Right (local) perturbation: q * exp(delta).
Quat boxplus(const Quat& q, const Vec3& delta);

/// Local difference such that boxplus(a, boxminus(b, a)) == b.
Vec3 boxminus(const Quat& b, const Quat& a);

/// Rotation angle between two attitudes, radians.
double angle_between(const Quat& a, const Quat& b);

bool all_finite(const Vec3& v);

// splitmix64 finalizer; used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rotorsim
