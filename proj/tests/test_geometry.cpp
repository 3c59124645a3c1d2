#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pgslam/pose2.hpp>

#include <random>

using namespace pgslam;

namespace {

/* Numeric Jacobian of compose wrt one argument, central differences. */
Mat3 numeric_jacobian(const Pose2d& a, const Pose2d& b, bool wrt_a, double h = 1e-7) {
  Mat3 j;
  for (int c = 0; c < 3; ++c) {
    Vec3 pv = (wrt_a ? a : b).vec(), mv = pv;
    pv[c] += h;
    mv[c] -= h;
    Pose2d pp = Pose2d::from_vec(pv), pm = Pose2d::from_vec(mv);
    Vec3 fp = (wrt_a ? compose(pp, b) : compose(a, pp)).vec();
    Vec3 fm = (wrt_a ? compose(pm, b) : compose(a, pm)).vec();
    Vec3 d = fp - fm;
    d[2] = wrap_angle(d[2]);
    j.col(c) = d / (2 * h);
  }
  return j;
}

Pose2d random_pose(std::mt19937& rng, double span = 5.0) {
  std::uniform_real_distribution<double> u(-span, span);
  std::uniform_real_distribution<double> ua(-M_PI, M_PI);
  return {u(rng), u(rng), ua(rng)};
}

}  // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(2 * M_PI) == doctest::Approx(0.0));
  CHECK(wrap_angle(M_PI + 1e-3) == doctest::Approx(-M_PI + 1e-3));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    double w = wrap_angle(u(rng));
    CHECK(w > -M_PI);
    CHECK(w <= M_PI);
  }
}

TEST_CASE("compose basics") {
  Pose2d r1 = compose(Pose2d(0, 0, 0), Pose2d(1, 2, M_PI / 2));
  CHECK(r1.x == doctest::Approx(1));
  CHECK(r1.y == doctest::Approx(2));
  CHECK(r1.theta == doctest::Approx(M_PI / 2));

  Pose2d r2 = compose(Pose2d(1, 0, M_PI / 2), Pose2d(1, 0, 0));
  CHECK(r2.x == doctest::Approx(1));
  CHECK(r2.y == doctest::Approx(1));
  CHECK(r2.theta == doctest::Approx(M_PI / 2));

  Pose2d a(2, 3, M_PI / 4);
  Pose2d r3 = compose(a, inverse_compose(a, a));
  CHECK(r3.x == doctest::Approx(2));
  CHECK(r3.y == doctest::Approx(3));
  CHECK(r3.theta == doctest::Approx(M_PI / 4));
}

TEST_CASE("compose is associative and (0,0,0) is a two-sided identity") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Pose2d a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    Vec3 lhs = compose(compose(a, b), c).vec();
    Vec3 rhs = compose(a, compose(b, c)).vec();
    Vec3 d = lhs - rhs;
    d[2] = wrap_angle(d[2]);
    CHECK(d.norm() < 1e-9);
    Vec3 li = compose(Pose2d(), a).vec();
    Vec3 ri = compose(a, Pose2d()).vec();
    CHECK((li - a.vec()).norm() < 1e-12);
    CHECK((ri - a.vec()).norm() < 1e-12);
  }
}

TEST_CASE("inverse_compose") {
  Pose2d z = inverse_compose(Pose2d(1, 2, 0.3), Pose2d(1, 2, 0.3));
  CHECK(z.vec().norm() < 1e-15);

  Pose2d d1 = inverse_compose(Pose2d(0, 0, M_PI / 2), Pose2d(0, 1, M_PI / 2));
  CHECK(d1.x == doctest::Approx(1));
  CHECK(d1.y == doctest::Approx(0).epsilon(1e-12));
  CHECK(d1.theta == doctest::Approx(0));

  Pose2d d2 = inverse_compose(Pose2d(1, 1, M_PI), Pose2d(0, 1, M_PI));
  CHECK(d2.x == doctest::Approx(1));
  CHECK(std::abs(d2.y) < 1e-12);
  CHECK(std::abs(d2.theta) < 1e-12);

  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    Pose2d a = random_pose(rng), b = random_pose(rng);
    Vec3 back = compose(a, inverse_compose(a, b)).vec();
    Vec3 d = back - b.vec();
    d[2] = wrap_angle(d[2]);
    CHECK(d.norm() < 1e-9);
  }
}

TEST_CASE("inverse round-trips through compose") {
  std::mt19937 rng(13);
  for (int i = 0; i < 200; ++i) {
    Pose2d a = random_pose(rng);
    CHECK(compose(a, inverse(a)).vec().norm() < 1e-9);
    CHECK(compose(inverse(a), a).vec().norm() < 1e-9);
  }
}

TEST_CASE("compounding Jacobians match finite differences") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    Pose2d a = random_pose(rng), b = random_pose(rng);
    Mat3 j1 = compose_jacobian_a(a, b);
    Mat3 j2 = compose_jacobian_b(a, b);
    Mat3 n1 = numeric_jacobian(a, b, true);
    Mat3 n2 = numeric_jacobian(a, b, false);
    CHECK((j1 - n1).norm() / std::max(1.0, n1.norm()) < 1e-6);
    CHECK((j2 - n2).norm() / std::max(1.0, n2.norm()) < 1e-6);
  }
}

TEST_CASE("compound_covariance worked values") {
  Mat3 zero = Mat3::Zero();
  Mat3 sigma;
  sigma << 0.2, 0.01, 0, 0.01, 0.3, 0.02, 0, 0.02, 0.1;
  Mat3 r = compound_covariance(Pose2d(0, 0, 0), zero, Pose2d(3, -1, 0.4), sigma);
  CHECK((r - sigma).norm() < 1e-12);

  Mat3 expect;
  expect << 1, 0, 0, 0, 2, 1, 0, 1, 1;
  Mat3 r2 = compound_covariance(Pose2d(0, 0, 0), Mat3::Identity(), Pose2d(1, 0, 0), zero);
  CHECK((r2 - expect).norm() < 1e-12);
}

TEST_CASE("compound_covariance is symmetric PSD for PSD inputs") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 300; ++i) {
    Mat3 a = Mat3::NullaryExpr([&](int, int) { return u(rng); });
    Mat3 b = Mat3::NullaryExpr([&](int, int) { return u(rng); });
    Mat3 ca = a * a.transpose(), cb = b * b.transpose();
    Mat3 r = compound_covariance(random_pose(rng), ca, random_pose(rng), cb);
    CHECK((r - r.transpose()).norm() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat3> es(r);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("compound_covariance agrees with Monte-Carlo propagation") {
  const double s = 1e-3;
  Mat3 cov_a = Mat3::Identity() * s * s;
  Mat3 cov_rel = Mat3::Identity() * s * s;
  Pose2d a(1.0, -0.5, 0.7), rel(0.8, 0.2, -0.3);
  Mat3 pred = compound_covariance(a, cov_a, rel, cov_rel);

  std::mt19937 rng(23);
  std::normal_distribution<double> g(0, s);
  const int n = 200000;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Mat3 acc = Mat3::Zero();
  Vec3 nominal = compose(a, rel).vec();
  std::vector<Vec3> samples(n);
  for (int i = 0; i < n; ++i) {
    Pose2d ap(a.x + g(rng), a.y + g(rng), a.theta + g(rng));
    Pose2d rp(rel.x + g(rng), rel.y + g(rng), rel.theta + g(rng));
    Vec3 d = compose(ap, rp).vec() - nominal;
    d[2] = wrap_angle(d[2]);
    samples[i] = d;
    mean += d;
  }
  mean /= n;
  for (const Vec3& d : samples) acc += (d - mean) * (d - mean).transpose();
  acc /= n - 1;
  CHECK((acc - pred).norm() / pred.norm() < 0.05);
}

TEST_CASE("smd worked values and properties") {
  CHECK(smd(Pose2d(1, 2, 0.5), Pose2d(1, 2, 0.5), Mat3::Identity()) == doctest::Approx(0));
  CHECK(smd(Pose2d(0, 0, 0), Pose2d(3, 4, 0), Mat3::Identity()) == doctest::Approx(25));
  Mat3 d = Vec3(4, 4, 1).asDiagonal();
  CHECK(smd(Pose2d(0, 0, 0), Pose2d(2, 0, 0), d) == doctest::Approx(1));

  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    Mat3 m = Mat3::NullaryExpr([&](int, int) { return u(rng); });
    Mat3 cov = m * m.transpose() + 0.1 * Mat3::Identity();
    Pose2d a = random_pose(rng), b = random_pose(rng);
    double ab = smd(a, b, cov);
    CHECK(ab >= 0);
    /* swap symmetry holds when the wrapped angle residual is symmetric */
    if (std::abs(std::abs(wrap_angle(b.theta - a.theta)) - M_PI) > 1e-9)
      CHECK(smd(b, a, cov) == doctest::Approx(ab).epsilon(1e-9));
  }
}

TEST_CASE("smd rejects singular covariance") {
  Mat3 sing = Vec3(1, 1, 0).asDiagonal();
  CHECK_THROWS_AS((void)smd(Pose2d(), Pose2d(1, 0, 0), sing), std::domain_error);
}

TEST_CASE("gaussian_uncertainty worked values") {
  double p0 = gaussian_uncertainty(Pose2d(), Pose2d(), Mat3::Identity());
  CHECK(p0 == doctest::Approx(std::pow(2 * M_PI, -1.5)).epsilon(1e-9));
  /* smd = 2 with identity covariance */
  double p2 = gaussian_uncertainty(Pose2d(0, 0, 0), Pose2d(std::sqrt(2.0), 0, 0), Mat3::Identity());
  CHECK(p2 == doctest::Approx(std::pow(2 * M_PI, -1.5) * std::exp(-1.0)).epsilon(1e-9));

  double prev = 1e9;
  for (double r = 0; r < 3; r += 0.25) {
    double v = gaussian_uncertainty(Pose2d(), Pose2d(r, 0, 0), Mat3::Identity());
    CHECK(v < prev);
    prev = v;
  }
}
