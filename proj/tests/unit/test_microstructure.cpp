#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "polarfft/errors.hpp"
#include "polarfft/microstructure.hpp"

using namespace polarfft;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("polarfft_test_" + name);
}

}  // namespace

TEST(Microstructure, LaminateFourCubed) {
  const Laminate l = gen_laminate({4, 4, 4}, 0.5, 0);
  EXPECT_EQ(l.layers, 2);
  EXPECT_DOUBLE_EQ(l.realized_fraction, 0.5);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) EXPECT_EQ(l.grid.at(i, j, k), i < 2 ? 1 : 0);
  EXPECT_DOUBLE_EQ(l.grid.volume_fraction(1), 0.5);
}

TEST(Microstructure, LaminateAlongOtherAxes) {
  const Laminate l = gen_laminate({4, 6, 2}, 0.5, 1);
  EXPECT_EQ(l.layers, 3);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 4; ++i) EXPECT_EQ(l.grid.at(i, j, k), j < 3 ? 1 : 0);
  EXPECT_EQ(gen_laminate({2, 2, 8}, 0.25, 2).layers, 2);
}

TEST(Microstructure, LaminateZeroFractionIsUniform) {
  const Laminate l = gen_laminate({4, 4, 4}, 0.0, 0);
  EXPECT_EQ(l.layers, 0);
  EXPECT_EQ(l.grid.max_phase(), 0);
}

TEST(Microstructure, LaminateRoundingRule) {
  const Laminate l = gen_laminate({5, 1, 1}, 0.5, 0);
  EXPECT_EQ(l.layers, 3);
  EXPECT_DOUBLE_EQ(l.realized_fraction, 0.6);
  EXPECT_THROW(gen_laminate({4, 4, 4}, 1.5, 0), ConfigError);
  EXPECT_THROW(gen_laminate({4, 4, 4}, 0.5, 3), ConfigError);
}

TEST(Microstructure, ZeroRadiusSphereIsEmpty) {
  const VoxelGrid g = gen_spheres({8, 8, 8}, {{{0.5, 0.5, 0.5}, 0.0}});
  EXPECT_EQ(g.max_phase(), 0);
}

TEST(Microstructure, CenteredCube) {
  const VoxelGrid g = gen_centered_cube({4, 4, 4}, {2, 2, 2});
  int inner = 0;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        const bool in = i >= 1 && i <= 2 && j >= 1 && j <= 2 && k >= 1 && k <= 2;
        EXPECT_EQ(g.at(i, j, k), in ? 0 : 1);
        inner += in;
      }
  EXPECT_EQ(inner, 8);
}

TEST(Microstructure, CenteredSphereFraction) {
  const VoxelGrid g = gen_spheres({16, 16, 16}, {{{0.5, 0.5, 0.5}, 0.25}});
  const double target = 4.0 / 3.0 * std::numbers::pi * 0.25 * 0.25 * 0.25;
  EXPECT_NEAR(g.volume_fraction(1), target, 0.15 * target);
}

TEST(Microstructure, PeriodicWrapAndTranslation) {
  const std::vector<Sphere> s{{{0.05, 0.5, 0.5}, 0.2}};
  const VoxelGrid a = gen_spheres({8, 8, 8}, s);
  // The sphere crosses x1 = 0, so voxels near x1 = 1 are inside.
  EXPECT_EQ(a.at(7, 4, 4), 1);
  const VoxelGrid b = gen_spheres({8, 8, 8}, {{{1.05, 1.5, -0.5}, 0.2}});
  EXPECT_EQ(a, b);
}

TEST(Microstructure, RandomSpheresAreSeeded) {
  const auto a = random_spheres(10, 0.2, 42);
  const auto b = random_spheres(10, 0.2, 42);
  const auto c = random_spheres(10, 0.2, 43);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].center, b[i].center);
    EXPECT_EQ(a[i].radius, b[i].radius);
  }
  EXPECT_NE(a[0].center, c[0].center);
  const double vol = 10 * 4.0 / 3.0 * std::numbers::pi * std::pow(a[0].radius, 3);
  EXPECT_NEAR(vol, 0.2, 1e-12);
  const auto discs = random_spheres(10, 0.2, 1, {1.0, 1.0, 1.0}, true);
  for (const auto& d : discs) EXPECT_DOUBLE_EQ(d.center[2], 0.5);
  EXPECT_NEAR(10 * std::numbers::pi * discs[0].radius * discs[0].radius, 0.2, 1e-12);
}

TEST(Microstructure, FourSpheresFraction) {
  const auto s = four_spheres(0.2);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(4 * 4.0 / 3.0 * std::numbers::pi * std::pow(s[0].radius, 3), 0.2, 1e-12);
  const VoxelGrid g = gen_spheres({16, 16, 16}, s);
  EXPECT_NEAR(g.volume_fraction(1), 0.2, 0.03);
}

TEST(Microstructure, MpvxRoundTrip) {
  const VoxelGrid a = gen_spheres({5, 4, 3}, {{{0.3, 0.4, 0.5}, 0.3}}, {1.0, 2.0, 0.5}, 3, 1);
  for (auto enc : {VoxelEncoding::Ascii, VoxelEncoding::Binary}) {
    EXPECT_EQ(parse_voxels(serialize_voxels(a, enc)), a);
    const auto path = temp_path(enc == VoxelEncoding::Ascii ? "a.mpvx" : "b.mpvx");
    save_voxels(a, path, enc);
    EXPECT_EQ(load_voxels(path), a);
    std::filesystem::remove(path);
  }
}

TEST(Microstructure, MpvxFormatText) {
  VoxelGrid g({2, 1, 1}, {1.0, 1.0, 1.0});
  g.at(1, 0, 0) = 1;
  EXPECT_EQ(serialize_voxels(g), "MPVX 1\ndims 2 1 1\nlength 1 1 1\nphases 2\ndata ascii\n0 1\n");
}

TEST(Microstructure, MpvxTwoDimensional) {
  const VoxelGrid g =
      parse_voxels("MPVX 1\ndims 3 3 1\nlength 1 1 1\nphases 2\ndata ascii\n0 1 0\n1 1 1\n0 0 0\n");
  EXPECT_EQ(g.dims, (std::array<int, 3>{3, 3, 1}));
  EXPECT_EQ(g.at(1, 1, 0), 1);
  EXPECT_EQ(g.at(0, 2, 0), 0);
}

TEST(Microstructure, MpvxErrors) {
  const std::string head = "MPVX 1\ndims 2 2 1\nlength 1 1 1\nphases 2\ndata ascii\n";
  try {
    parse_voxels(head + "0 1 1\n");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('4'), std::string::npos) << msg;
    EXPECT_NE(msg.find('3'), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_voxels("MPVX 2\n" + head.substr(7) + "0 1 1 0\n"), IoError);
  EXPECT_THROW(parse_voxels("MPVX 1\ndims 2 x 1\nlength 1 1 1\nphases 2\ndata ascii\n0 0\n"),
               IoError);
  EXPECT_THROW(parse_voxels(head + "0 1 1 0 1\n"), IoError);
  EXPECT_THROW(parse_voxels(head + "0 1 1 7\n"), IoError);
  EXPECT_THROW(parse_voxels("hello"), IoError);
  EXPECT_THROW(load_voxels(temp_path("does_not_exist.mpvx")), IoError);
}

TEST(Microstructure, GridBasics) {
  EXPECT_THROW(VoxelGrid({0, 1, 1}, {1.0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(VoxelGrid({1, 1, 1}, {1.0, -1.0, 1.0}), ConfigError);
  const VoxelGrid g({4, 2, 1}, {2.0, 1.0, 1.0});
  const Vec3 c = g.voxel_center(1, 0, 0);
  EXPECT_DOUBLE_EQ(c[0], 0.75);
  EXPECT_DOUBLE_EQ(c[1], 0.25);
  EXPECT_DOUBLE_EQ(c[2], 0.5);
  EXPECT_EQ(g.index(3, 1, 0), 7u);
}
