#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polarfft/spectral.hpp"

namespace polarfft {

/// Periodic voxel image of phase IDs, x1 fastest.
struct VoxelGrid {
  std::array<int, 3> dims{1, 1, 1};
  Vec3 lengths{1.0, 1.0, 1.0};
  std::vector<std::uint8_t> phase;

  VoxelGrid() = default;
  /// Filled with phase `fill`. Throws ConfigError for non-positive dims or lengths.
  VoxelGrid(std::array<int, 3> dims, Vec3 lengths, std::uint8_t fill = 0);

  std::size_t voxels() const { return phase.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                static_cast<std::size_t>(dims[1]) * k);
  }
  std::uint8_t& at(int i, int j, int k) { return phase[index(i, j, k)]; }
  std::uint8_t at(int i, int j, int k) const { return phase[index(i, j, k)]; }

  Vec3 voxel_center(int i, int j, int k) const;
  FrequencyGrid frequency_grid() const { return FrequencyGrid(dims, lengths); }

  int max_phase() const;
  /// Fraction of voxels carrying phase `id`.
  double volume_fraction(std::uint8_t id) const;

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;
};

/// Normal axis (x2) of the laminate used by the bundled studies. Under a
/// pure E12 shear this orientation couples the layers through m.
inline constexpr int kStudyLaminateNormal = 1;

struct Laminate {
  VoxelGrid grid;
  int layers = 0;                    ///< number of phase-1 layers
  double realized_fraction = 0.0;    ///< of phase 1
};

/// Layers normal to `normal_axis` (0, 1 or 2). The first floor(vf N + 0.5)
/// layers along the axis carry phase 1, the rest phase 0.
Laminate gen_laminate(std::array<int, 3> dims, double volume_fraction, int normal_axis = 0,
                      Vec3 lengths = {1.0, 1.0, 1.0});

struct Sphere {
  Vec3 center;
  double radius;
};

/// Voxels whose center lies within a sphere (periodic distance) get
/// `inclusion`, the rest `matrix`.
VoxelGrid gen_spheres(std::array<int, 3> dims, const std::vector<Sphere>& spheres,
                      Vec3 lengths = {1.0, 1.0, 1.0}, std::uint8_t inclusion = 1,
                      std::uint8_t matrix = 0);

/// Non-overlapping spheres of equal radius placed by seeded rejection
/// sampling. The radius is chosen to hit `volume_fraction` of the cell
/// volume (continuum estimate). With `planar`, the inclusions are discs in
/// the x1-x2 plane: centres sit at mid-height and the fraction is an area
/// fraction. Throws ConfigError if placement fails.
std::vector<Sphere> random_spheres(int count, double volume_fraction, std::uint64_t seed,
                                   Vec3 lengths = {1.0, 1.0, 1.0}, bool planar = false);

/// Four equal spheres on the face-centred positions of the unit cell with
/// total volume fraction `volume_fraction`.
std::vector<Sphere> four_spheres(double volume_fraction, Vec3 lengths = {1.0, 1.0, 1.0});

/// Centred box of inner_extent voxels per axis (clamped to dims) with phase
/// `inner`; the rest `outer`.
VoxelGrid gen_centered_cube(std::array<int, 3> dims, std::array<int, 3> inner_extent,
                            Vec3 lengths = {1.0, 1.0, 1.0}, std::uint8_t inner = 0,
                            std::uint8_t outer = 1);

enum class VoxelEncoding { Ascii, Binary };

/// MPVX v1 reader. Throws IoError naming the problem (unknown version,
/// malformed header, payload count mismatch).
VoxelGrid load_voxels(const std::filesystem::path& path);
VoxelGrid parse_voxels(const std::string& bytes);

void save_voxels(const VoxelGrid& grid, const std::filesystem::path& path,
                 VoxelEncoding encoding = VoxelEncoding::Ascii);
std::string serialize_voxels(const VoxelGrid& grid, VoxelEncoding encoding = VoxelEncoding::Ascii);

}  // namespace polarfft
