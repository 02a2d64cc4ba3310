#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "mvpose3d/mvpose3d.hpp"

using namespace mvpose3d;

namespace {

Eigen::Matrix3d canonical(Eigen::Matrix3d m) {
  detail::canonicalize(m);
  return m;
}

}  // namespace

TEST_CASE("camera validation accepts the synthetic rig", "[geometry]") {
  for (const Camera& cam : ring_cameras(5)) REQUIRE_NOTHROW(cam.validate());
}

TEST_CASE("camera validation rejects broken calibrations", "[geometry]") {
  Camera cam = testutil::stereo_rig(1000.0)[0];

  SECTION("non-orthonormal rotation") {
    cam.rotation(0, 0) = 2.0;
    REQUIRE_THROWS_AS(cam.validate(), std::invalid_argument);
  }
  SECTION("reflection") {
    cam.rotation.col(0) *= -1.0;
    REQUIRE_THROWS_AS(cam.validate(), std::invalid_argument);
  }
  SECTION("non-positive focal length") {
    cam.intrinsics(0, 0) = -550.0;
    REQUIRE_THROWS_AS(cam.validate(), std::invalid_argument);
  }
  SECTION("lower-triangular intrinsics entry") {
    cam.intrinsics(1, 0) = 3.0;
    REQUIRE_THROWS_AS(cam.validate(), std::invalid_argument);
  }
  SECTION("empty image") {
    cam.width = 0;
    REQUIRE_THROWS_AS(cam.validate(), std::invalid_argument);
  }
}

TEST_CASE("camera center inverts the extrinsics", "[geometry]") {
  const auto cams = ring_cameras(4);
  for (const Camera& cam : cams) {
    const Eigen::Vector3d c = cam.center();
    REQUIRE((cam.rotation * c + cam.translation).norm() < 1e-9);
    REQUIRE(std::hypot(c.x(), c.y()) == Catch::Approx(5000.0).margin(1e-6));
    REQUIRE(c.z() == Catch::Approx(2500.0).margin(1e-6));
  }
}

TEST_CASE("pure translation gives a skew fundamental matrix", "[geometry]") {
  Camera a;
  a.id = 0;
  a.width = 640;
  a.height = 480;
  Camera b = a;
  b.id = 1;
  b.translation = Eigen::Vector3d(-1000.0, 0.0, 0.0);  // center at (1000, 0, 0)

  const FundamentalMatrix f = fundamental_from_cameras(a, b);
  const Eigen::Matrix3d expected = canonical(skew(Eigen::Vector3d(1.0, 0.0, 0.0)));
  // The two largest entries of a skew matrix tie in magnitude, so the sign
  // convention can land either way; compare up to overall sign.
  const double direct = (f.matrix - expected).cwiseAbs().maxCoeff();
  const double negated = (f.matrix + expected).cwiseAbs().maxCoeff();
  REQUIRE(std::min(direct, negated) < 1e-12);
}

TEST_CASE("fundamental matrix annihilates true correspondences", "[geometry]") {
  const auto cams = ring_cameras(3);
  const FundamentalMatrix f01 = fundamental_from_cameras(cams[0], cams[1]);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-1500.0, 1500.0), z(0.0, 1900.0);
  for (int i = 0; i < 100; ++i) {
    const Point3 p(x(rng), x(rng), z(rng));
    const Point2 pi = project(cams[0], p);
    const Point2 pj = project(cams[1], p);
    const double residual =
        std::abs(pj.homogeneous().dot(f01.matrix * pi.homogeneous()));
    REQUIRE(residual < 1e-6);
  }
}

TEST_CASE("fundamental matrix has rank two and unit norm", "[geometry]") {
  const auto cams = ring_cameras(5);
  for (int j = 1; j < 5; ++j) {
    const FundamentalMatrix f = fundamental_from_cameras(cams[0], cams[j]);
    REQUIRE(f.matrix.norm() == Catch::Approx(1.0).margin(1e-12));
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(f.matrix);
    REQUIRE(svd.singularValues()(2) / svd.singularValues()(0) < 1e-9);
  }
}

TEST_CASE("swapping the camera pair transposes the fundamental matrix",
          "[geometry]") {
  const auto cams = ring_cameras(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const FundamentalMatrix fij = fundamental_from_cameras(cams[i], cams[j]);
      const FundamentalMatrix fji = fundamental_from_cameras(cams[j], cams[i]);
      const Eigen::Matrix3d t = canonical(fji.matrix.transpose());
      REQUIRE((fij.matrix - t).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("coincident cameras cannot form a fundamental matrix", "[geometry]") {
  auto cams = testutil::stereo_rig(1000.0);
  cams[1].translation = cams[0].translation;
  REQUIRE_THROWS_AS(fundamental_from_cameras(cams[0], cams[1]),
                    CoincidentCameras);
}

TEST_CASE("projection divides by depth", "[geometry]") {
  Camera cam;
  cam.id = 0;
  cam.width = 2;
  cam.height = 2;
  const Point2 p = project(cam, Point3(100.0, -50.0, 200.0));
  REQUIRE(p.x() == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(p.y() == Catch::Approx(-0.25).margin(1e-12));
}

TEST_CASE("the optical axis projects to the principal point", "[geometry]") {
  const Camera cam = testutil::stereo_rig(1000.0)[0];
  const Point2 p = project(cam, Point3(0.0, 0.0, 3000.0));
  REQUIRE(p.x() == Catch::Approx(320.0).margin(1e-9));
  REQUIRE(p.y() == Catch::Approx(240.0).margin(1e-9));
}

TEST_CASE("points behind the camera are rejected", "[geometry]") {
  const Camera cam = testutil::stereo_rig(1000.0)[0];
  REQUIRE_THROWS_AS(project(cam, Point3(0.0, 0.0, -100.0)), BehindCamera);
  REQUIRE_THROWS_AS(project(cam, Point3(10.0, 10.0, 0.0)), BehindCamera);
}

TEST_CASE("point to line distance", "[geometry]") {
  // x = 3 vertical line.
  REQUIRE(point_line_distance(Point2(0.0, 7.0), Eigen::Vector3d(1, 0, -3)) ==
          Catch::Approx(3.0));
  // Degenerate line direction.
  REQUIRE(is_forbidden(point_line_distance(Point2(1.0, 2.0),
                                           Eigen::Vector3d(0, 0, 5))));
}

TEST_CASE("epipolar joint distance vanishes on true correspondences",
          "[geometry]") {
  const auto cams = ring_cameras(4);
  const FundamentalMatrix f01 = fundamental_from_cameras(cams[0], cams[1]);
  const FundamentalMatrix f10 = fundamental_from_cameras(cams[1], cams[0]);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-1200.0, 1200.0), z(100.0, 1800.0);
  for (int i = 0; i < 50; ++i) {
    const Point3 p(x(rng), x(rng), z(rng));
    const double d = epipolar_joint_distance(project(cams[0], p),
                                             project(cams[1], p), f01, f10);
    REQUIRE(d < 1e-6);
  }
}

TEST_CASE("a perpendicular pixel offset shows up in the distance",
          "[geometry]") {
  const auto cams = ring_cameras(4);
  const FundamentalMatrix f01 = fundamental_from_cameras(cams[0], cams[1]);
  const FundamentalMatrix f10 = fundamental_from_cameras(cams[1], cams[0]);

  const Point3 world(300.0, -200.0, 1200.0);
  const Point2 pi = project(cams[0], world);
  const Point2 pj = project(cams[1], world);

  // Push the second view's point 5 px off its epipolar line.
  const Eigen::Vector3d line_j = f01.matrix * pi.homogeneous();
  const Eigen::Vector2d normal =
      Eigen::Vector2d(line_j.x(), line_j.y()).normalized();
  const Point2 pj_off = pj + 5.0 * normal;

  REQUIRE(point_line_distance(pj_off, line_j) == Catch::Approx(5.0).margin(1e-9));
  // The reverse term adds a nonnegative amount, so 5 px is a floor.
  const double total = epipolar_joint_distance(pi, pj_off, f01, f10);
  REQUIRE(total >= 5.0 - 1e-9);
  REQUIRE(total < 15.0);
}

TEST_CASE("epipolar distance grows with pixel noise on average", "[geometry]") {
  const auto cams = ring_cameras(4);
  const FundamentalMatrix f01 = fundamental_from_cameras(cams[0], cams[1]);
  const FundamentalMatrix f10 = fundamental_from_cameras(cams[1], cams[0]);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(-1200.0, 1200.0), z(100.0, 1800.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  double sum = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const Point3 p(x(rng), x(rng), z(rng));
    const Point2 pi = project(cams[0], p) + Point2(noise(rng), noise(rng));
    const Point2 pj = project(cams[1], p) + Point2(noise(rng), noise(rng));
    sum += epipolar_joint_distance(pi, pj, f01, f10);
  }
  const double mean = sum / n;
  REQUIRE(mean > 1.0);
  REQUIRE(mean < 3.5);
}

TEST_CASE("algebraic mode evaluates the bilinear forms", "[geometry]") {
  const auto cams = ring_cameras(3);
  const FundamentalMatrix f01 = fundamental_from_cameras(cams[0], cams[1]);
  const FundamentalMatrix f10 = fundamental_from_cameras(cams[1], cams[0]);

  const Point2 pi(100.0, 200.0), pj(350.0, 150.0);
  const double expected =
      std::abs(pj.homogeneous().dot(f01.matrix * pi.homogeneous())) +
      std::abs(pi.homogeneous().dot(f10.matrix * pj.homogeneous()));
  REQUIRE(epipolar_joint_distance(pi, pj, f01, f10, EpipolarMode::kAlgebraic) ==
          Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("triangulation inverts projection on exact data", "[geometry]") {
  const auto cams = ring_cameras(4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-1200.0, 1200.0), z(50.0, 1900.0);

  for (int i = 0; i < 50; ++i) {
    const Point3 p(x(rng), x(rng), z(rng));
    std::vector<std::pair<const Camera*, Point2>> obs;
    for (const Camera& cam : cams) obs.push_back({&cam, project(cam, p)});
    REQUIRE((triangulate_joint(obs) - p).norm() < 1e-6);
  }
}

TEST_CASE("two-view triangulation stays accurate under pixel noise",
          "[geometry]") {
  const auto cams = testutil::stereo_rig(2000.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> jitter(-300.0, 300.0);
  std::normal_distribution<double> px(0.0, 1.0);

  std::vector<double> errors;
  for (int i = 0; i < 1000; ++i) {
    const Point3 p(jitter(rng), jitter(rng), 3000.0 + jitter(rng));
    std::vector<std::pair<const Camera*, Point2>> obs;
    for (const Camera& cam : cams)
      obs.push_back({&cam, project(cam, p) + Point2(px(rng), px(rng))});
    errors.push_back((triangulate_joint(obs) - p).norm());
  }
  std::nth_element(errors.begin(), errors.begin() + errors.size() / 2,
                   errors.end());
  REQUIRE(errors[errors.size() / 2] < 30.0);
}

TEST_CASE("triangulation requires two views", "[geometry]") {
  const Camera cam = testutil::stereo_rig(1000.0)[0];
  std::vector<std::pair<const Camera*, Point2>> obs = {
      {&cam, Point2(320.0, 240.0)}};
  REQUIRE_THROWS_AS(triangulate_joint(obs), InsufficientViews);
  obs.clear();
  REQUIRE_THROWS_AS(triangulate_joint(obs), InsufficientViews);
}

TEST_CASE("identical viewpoints cannot triangulate", "[geometry]") {
  auto cams = testutil::stereo_rig(1000.0);
  cams[1].translation = cams[0].translation;  // same pose, different id
  std::vector<std::pair<const Camera*, Point2>> obs = {
      {&cams[0], Point2(300.0, 200.0)}, {&cams[1], Point2(300.0, 200.0)}};
  REQUIRE_THROWS_AS(triangulate_joint(obs), DegenerateGeometry);
}

TEST_CASE("parallel rays triangulate to no finite point", "[geometry]") {
  // Pure translation plus the same pixel in both images means the rays
  // never meet.
  const auto cams = testutil::stereo_rig(2000.0);
  std::vector<std::pair<const Camera*, Point2>> obs = {
      {&cams[0], Point2(400.0, 260.0)}, {&cams[1], Point2(400.0, 260.0)}};
  REQUIRE_THROWS_AS(triangulate_joint(obs), DegenerateGeometry);
}
