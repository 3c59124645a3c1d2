#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace pgslam {

/* Wraps an angle to (-pi, pi]. */
template <typename S>
S wrap_angle(S a) {
  S r = std::remainder(a, S(2) * S(M_PI));
  if (r <= -S(M_PI)) r += S(2) * S(M_PI);
  return r;
}

/* An SE(2) pose (x, y, theta); theta is normalized eagerly so residual
 * arithmetic never sees an unwrapped angle. The same type doubles as a
 * rigid-body transform. */
template <typename S>
struct Pose2 {
  S x{0};
  S y{0};
  S theta{0};

  Pose2() = default;
  Pose2(S x_, S y_, S theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static Pose2 Identity() { return Pose2(); }

  Eigen::Matrix<S, 3, 1> vec() const { return {x, y, theta}; }
  static Pose2 from_vec(const Eigen::Matrix<S, 3, 1>& v) {
    return Pose2(v[0], v[1], v[2]);
  }

  Eigen::Matrix<S, 2, 2> rotation() const {
    const S c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix<S, 2, 2> r;
    r << c, -s, s, c;
    return r;
  }
};

using Pose2d = Pose2<double>;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

template <typename S>
Pose2<S> compose(const Pose2<S>& a, const Pose2<S>& b) {
  const S c = std::cos(a.theta), s = std::sin(a.theta);
  return Pose2<S>(a.x + c * b.x - s * b.y,
                  a.y + s * b.x + c * b.y,
                  a.theta + b.theta);
}

/* Returns d such that compose(a, d) == b. */
template <typename S>
Pose2<S> inverse_compose(const Pose2<S>& a, const Pose2<S>& b) {
  const S c = std::cos(a.theta), s = std::sin(a.theta);
  const S dx = b.x - a.x, dy = b.y - a.y;
  return Pose2<S>(c * dx + s * dy, -s * dx + c * dy, b.theta - a.theta);
}

template <typename S>
Pose2<S> inverse(const Pose2<S>& a) {
  return inverse_compose(a, Pose2<S>());
}

/* Jacobian of compose(a, b) with respect to a, evaluated at the result r. */
template <typename S>
Eigen::Matrix<S, 3, 3> compose_jacobian_a(const Pose2<S>& a, const Pose2<S>& b) {
  const Pose2<S> r = compose(a, b);
  Eigen::Matrix<S, 3, 3> j = Eigen::Matrix<S, 3, 3>::Identity();
  j(0, 2) = -(r.y - a.y);
  j(1, 2) = r.x - a.x;
  return j;
}

/* Jacobian of compose(a, b) with respect to b. */
template <typename S>
Eigen::Matrix<S, 3, 3> compose_jacobian_b(const Pose2<S>& a, const Pose2<S>&) {
  Eigen::Matrix<S, 3, 3> j = Eigen::Matrix<S, 3, 3>::Identity();
  j.template topLeftCorner<2, 2>() = a.rotation();
  return j;
}

/* First-order covariance of compose(pose_a, rel): J1 S_a J1' + J2 S_rel J2',
 * symmetrized. */
template <typename S, typename DA, typename DR>
Eigen::Matrix<S, 3, 3> compound_covariance(const Pose2<S>& pose_a,
                                           const Eigen::MatrixBase<DA>& cov_a,
                                           const Pose2<S>& rel,
                                           const Eigen::MatrixBase<DR>& cov_rel) {
  const Eigen::Matrix<S, 3, 3> j1 = compose_jacobian_a(pose_a, rel);
  const Eigen::Matrix<S, 3, 3> j2 = compose_jacobian_b(pose_a, rel);
  Eigen::Matrix<S, 3, 3> out = j1 * cov_a * j1.transpose() + j2 * cov_rel * j2.transpose();
  return ((out + out.transpose()) / S(2)).eval();
}

template <typename S>
Eigen::Matrix<S, 3, 1> pose_residual(const Pose2<S>& a, const Pose2<S>& b) {
  return {b.x - a.x, b.y - a.y, wrap_angle(b.theta - a.theta)};
}

/* First-order covariance of inverse(z) given the covariance of z. */
template <typename S, typename D>
Eigen::Matrix<S, 3, 3> inverse_covariance(const Pose2<S>& z,
                                          const Eigen::MatrixBase<D>& cov) {
  const Pose2<S> zi = inverse(z);
  const S c = std::cos(z.theta), s = std::sin(z.theta);
  Eigen::Matrix<S, 3, 3> j;
  j << -c, -s, zi.y,
        s, -c, -zi.x,
        0,  0, -1;
  Eigen::Matrix<S, 3, 3> out = j * cov * j.transpose();
  return ((out + out.transpose()) / S(2)).eval();
}

/* Squared Mahalanobis distance of the wrapped residual b - a under cov. */
template <typename S, typename D>
S smd(const Pose2<S>& a, const Pose2<S>& b, const Eigen::MatrixBase<D>& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<S, 3, 3>> es(cov);
  if (es.eigenvalues().minCoeff() <= S(1e-12))
    throw std::domain_error("smd: singular covariance (degenerate uncertainty)");
  const Eigen::Matrix<S, 3, 1> r = pose_residual(a, b);
  return r.dot(es.eigenvectors() *
               (es.eigenvalues().cwiseInverse().asDiagonal() *
                (es.eigenvectors().transpose() * r)));
}

/* Normalized Gaussian likelihood (1/eta) exp(-smd/2), eta = (2 pi)^{3/2} sqrt(det). */
template <typename S, typename D>
S gaussian_uncertainty(const Pose2<S>& a, const Pose2<S>& b,
                       const Eigen::MatrixBase<D>& cov) {
  const S d = smd(a, b, cov);
  const S eta = std::pow(S(2) * S(M_PI), S(1.5)) * std::sqrt(cov.determinant());
  return std::exp(-d / S(2)) / eta;
}

}  // namespace pgslam
