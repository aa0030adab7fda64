#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "aug3d/error.hpp"
#include "aug3d/scene_model.hpp"
#include "oracle.hpp"

using namespace aug3d;

namespace {

constexpr std::string_view kCameras = "# comment\n1 PINHOLE 640 480 500 500 320 240\n";

SceneModel one_image(std::string_view image_row, std::string_view points = "") {
  std::string images(image_row);
  images += "\n\n";
  return parse_sfm_model(images, kCameras, points);
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no aug3d::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(SfmText, IdentityPoseHasOriginCenter) {
  const SceneModel s = one_image("1 1 0 0 0 0 0 0 1 a.jpg");
  ASSERT_EQ(s.cameras.size(), 1u);
  const CameraPose& p = s.camera(1);
  EXPECT_TRUE(p.rotation_matrix().isIdentity(0.0));
  EXPECT_EQ(camera_center(p), Vec3::Zero());
  EXPECT_EQ(p.name, "a.jpg");
}

TEST(SfmText, TrackDuplicatesCollapse) {
  const SceneModel s = one_image("7 1 0 0 0 0 0 0 1 a.jpg", "0 1 2 3 255 0 0 0.5 7 0 7 1\n");
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_EQ(s.points[0].track, std::vector<ImageId>{7});
  EXPECT_EQ(s.points[0].color, (Rgb{255, 0, 0}));
}

TEST(SfmText, NineFieldRowIsParseErrorAtItsLine) {
  const std::string images = "# header\n1 1 0 0 0 0 0 0 1 a.jpg\n\n2 1 0 0 0 0 0 0 1\n\n";
  try {
    parse_sfm_model(images, kCameras, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(SfmText, DanglingAndEmptyInputs) {
  EXPECT_EQ(kind_of([] { one_image("1 1 0 0 0 0 0 0 9 a.jpg"); }), ErrorKind::Reference);
  EXPECT_EQ(kind_of([] { parse_sfm_model("# nothing\n", kCameras, ""); }), ErrorKind::EmptyModel);
  EXPECT_EQ(kind_of([] { one_image("1 1 0 0 0 0 0 0 1 a.jpg", "0 1 2 3 255 0 0 0.5 8 0\n"); }),
            ErrorKind::Reference);
}

TEST(SfmText, SimplePinholeMapsToEqualFocals) {
  const SceneModel s =
      parse_sfm_model("1 1 0 0 0 0 0 0 4 a.jpg\n\n", "4 SIMPLE_PINHOLE 100 80 90 50 40\n", "");
  const Intrinsics& in = s.intrinsics.at(4);
  EXPECT_EQ(in.fx, 90.0);
  EXPECT_EQ(in.fy, 90.0);
  EXPECT_EQ(in.cx, 50.0);
}

TEST(SfmText, QuaternionsAreNormalizedAndSeqFollowsFileOrder) {
  const SceneModel s = parse_sfm_model("9 2 0 0 0 0 0 0 1 a.jpg\n\n3 1 1 0 0 0 0 0 1 b.jpg\n\n", kCameras, "");
  EXPECT_NEAR(s.camera(9).rotation.norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.camera(3).rotation.norm(), 1.0, 1e-12);
  EXPECT_EQ(s.camera(9).seq_index, 0u);
  EXPECT_EQ(s.camera(3).seq_index, 1u);
}

TEST(SfmText, WriteThenParseIsIdentical) {
  const SceneModel a = oracle::random_scene(11, 25, 300);
  const SfmText t = write_sfm_model(a);
  const SceneModel b = parse_sfm_model(t.images, t.cameras, t.points);
  ASSERT_EQ(a.cameras.size(), b.cameras.size());
  for (const auto& [id, pa] : a.cameras) {
    const CameraPose& pb = b.camera(id);
    EXPECT_EQ(pa.rotation.coeffs(), pb.rotation.coeffs());
    EXPECT_EQ(pa.translation, pb.translation);
    EXPECT_EQ(pa.intrinsics_id, pb.intrinsics_id);
    EXPECT_EQ(pa.name, pb.name);
    EXPECT_EQ(pa.seq_index, pb.seq_index);
  }
  EXPECT_EQ(a.intrinsics, b.intrinsics);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].point_id, b.points[i].point_id);
    EXPECT_EQ(a.points[i].position, b.points[i].position);
    EXPECT_EQ(a.points[i].color, b.points[i].color);
    EXPECT_EQ(a.points[i].track, b.points[i].track);
  }
  const SfmText again = write_sfm_model(b);
  EXPECT_EQ(t.images, again.images);
  EXPECT_EQ(t.points, again.points);
}

TEST(Ply, ParsesPositionsAndColors) {
  const auto pts = parse_ply(
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
      "end_header\n0 0 0\n1 2 3\n");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].position, Vec3(1, 2, 3));
  EXPECT_EQ(pts[1].point_id, 1u);
  EXPECT_EQ(pts[0].color, Rgb{});
  EXPECT_TRUE(pts[0].track.empty());

  const auto red = parse_ply(
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n0 0 0 255 0 0\n");
  EXPECT_EQ(red[0].color, (Rgb{255, 0, 0}));
}

TEST(Ply, Errors) {
  EXPECT_EQ(kind_of([] {
              parse_ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                        "property float z\nend_header\n0 0 0\n1 1 1\n");
            }),
            ErrorKind::Truncation);
  EXPECT_EQ(kind_of([] {
              parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                        "end_header\n0 0\n");
            }),
            ErrorKind::Format);
}

TEST(Ply, WriteThenParse) {
  const SceneModel s = oracle::random_scene(3, 5, 50);
  const auto back = parse_ply(write_ply(s.points));
  ASSERT_EQ(back.size(), s.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i].position, s.points[i].position);
}

TEST(Geometry, CameraCenter) {
  CameraPose p;
  EXPECT_EQ(camera_center(p), Vec3::Zero());
  p.translation = Vec3(0, 0, -100);
  EXPECT_EQ(camera_center(p), Vec3(0, 0, 100));
  // 180 degrees about X: R = diag(1, -1, -1), C = -R^T t.
  p.rotation = Quat(0, 1, 0, 0);
  p.translation = Vec3(0, 0, 100);
  EXPECT_TRUE(camera_center(p).isApprox(Vec3(0, 0, 100), 1e-12));
}

TEST(Geometry, OpticalAxisRay) {
  CameraPose id;
  const Ray r0 = optical_axis_ray(id);
  EXPECT_EQ(r0.origin, Vec3::Zero());
  EXPECT_EQ(r0.direction, Vec3::UnitZ());

  Mat3 down;
  down << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const Ray r1 = optical_axis_ray(pose_from_center(down, Vec3(0, 0, 100)));
  EXPECT_TRUE(r1.direction.isApprox(Vec3(0, 0, -1), 1e-15));
  EXPECT_TRUE(r1.origin.isApprox(Vec3(0, 0, 100), 1e-12));

  CameraPose tilted;
  tilted.rotation = Quat(Eigen::AngleAxisd(std::numbers::pi / 4, Vec3(1, 1, 0).normalized()));
  const Ray r2 = optical_axis_ray(tilted);
  const auto& q = tilted.rotation;
  const Vec3 expect = oracle::quat_to_matrix(q.w(), q.x(), q.y(), q.z()).transpose() * Vec3::UnitZ();
  EXPECT_NEAR(r2.direction.norm(), 1.0, 1e-12);
  EXPECT_TRUE(r2.direction.isApprox(expect, 1e-12));
}

TEST(Geometry, RayPlane) {
  const Plane ground = Plane::horizontal(0.0);
  auto a = ray_plane_intersect({Vec3(0, 0, 100), Vec3(0, 0, -1)}, ground);
  ASSERT_TRUE(a);
  EXPECT_TRUE(a->isApprox(Vec3(0, 0, 0)));
  auto b = ray_plane_intersect({Vec3(0, 0, 100), Vec3(1, 0, -1).normalized()}, ground);
  ASSERT_TRUE(b);
  EXPECT_NEAR(b->x(), 100.0, 1e-9);
  EXPECT_NEAR(b->z(), 0.0, 1e-9);
  EXPECT_FALSE(ray_plane_intersect({Vec3(0, 0, 100), Vec3(0, 0, 1)}, ground));
  EXPECT_FALSE(ray_plane_intersect({Vec3(0, 0, 100), Vec3(1, 0, 0)}, ground));
}

TEST(Geometry, RayPlaneHitsLieOnPlane) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 1000; ++i) {
    Plane p{Vec3(n01(g), n01(g), n01(g)).normalized(), 10 * n01(g)};
    Ray r{Vec3(50 * n01(g), 50 * n01(g), 50 * n01(g)), Vec3(n01(g), n01(g), n01(g)).normalized()};
    if (auto x = ray_plane_intersect(r, p)) EXPECT_LT(std::abs(p.signed_distance(*x)), 1e-6);
  }
}

TEST(Geometry, SceneBounds) {
  std::vector<Point3D> two(2);
  two[1].position = Vec3(1, 2, 3);
  auto b = scene_bounds(two);
  EXPECT_EQ(b.min, Vec3::Zero());
  EXPECT_EQ(b.max, Vec3(1, 2, 3));

  auto single = scene_bounds(std::span(two).subspan(1));
  EXPECT_EQ(single.min, single.max);

  const SceneModel s = oracle::random_scene(8, 2, 1000);
  double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
  for (const Point3D& p : s.points) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p.position[a]);
      hi[a] = std::max(hi[a], p.position[a]);
    }
  }
  const auto rb = scene_bounds(s.points);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(rb.min[a], lo[a]);
    EXPECT_EQ(rb.max[a], hi[a]);
  }
  EXPECT_EQ(kind_of([] { scene_bounds({}); }), ErrorKind::EmptyInput);
}

TEST(Geometry, QuaternionRoundTripPreservesAction) {
  std::mt19937_64 g(17);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 200; ++t) {
    Quat q(n01(g), n01(g), n01(g), n01(g));
    q.normalize();
    const Quat back(q.toRotationMatrix());
    for (int i = 0; i < 10; ++i) {
      const Vec3 v(n01(g), n01(g), n01(g));
      EXPECT_LT((q * v - back * v).norm(), 1e-9);
    }
  }
}

TEST(Ingest, RemapUpAxisMovesYToZ) {
  SceneModel s = oracle::random_scene(1, 3, 10);
  const Vec3 before = s.points[0].position;
  const Vec3 c0 = camera_center(s.cameras.begin()->second);
  s.up_axis = Axis::Y;
  const SceneModel r = remap_up_axis(s, Axis::Y);
  EXPECT_EQ(r.up_axis, Axis::Z);
  EXPECT_EQ(r.points[0].position.z(), before.y());
  EXPECT_TRUE(camera_center(r.cameras.begin()->second).isApprox(Vec3(c0.z(), c0.x(), c0.y()), 1e-9));
}

TEST(Ingest, AlignGroundLevelsATiltedFloor) {
  SceneModel s = oracle::random_scene(2, 3, 10);
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0, 100);
  const Eigen::AngleAxisd tilt(0.2, Vec3::UnitX());
  s.points.clear();
  for (int i = 0; i < 2000; ++i) {
    Point3D p;
    p.point_id = static_cast<PointId>(i);
    p.position = tilt * Vec3(u(g), u(g), i % 2 == 0 ? 0.0 : 5 + u(g));
    s.points.push_back(p);
  }
  const Vec3 c = camera_center(s.cameras.begin()->second);
  const SceneModel a = align_ground(s);
  double zmin = INFINITY, zmax = -INFINITY;
  for (std::size_t i = 0; i < a.points.size(); i += 2) {
    zmin = std::min(zmin, a.points[i].position.z());
    zmax = std::max(zmax, a.points[i].position.z());
  }
  EXPECT_LT(zmax - zmin, 1e-6);
  // Rigid: camera-to-point distances are preserved.
  const Vec3 ca = camera_center(a.cameras.begin()->second);
  EXPECT_NEAR((ca - a.points[7].position).norm(), (c - s.points[7].position).norm(), 1e-6);
}

TEST(SceneModel, ValidateRejectsBrokenTracks) {
  SceneModel s = oracle::random_scene(4, 3, 5);
  s.validate();
  s.points[0].track = {999999};
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::Reference);
}
