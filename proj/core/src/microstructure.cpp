#include "polarfft/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "polarfft/errors.hpp"

namespace polarfft {

namespace {

double periodic_delta(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double periodic_distance2(const Vec3& a, const Vec3& b, const Vec3& period) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double x = periodic_delta(a[d], b[d], period[d]);
    s += x * x;
  }
  return s;
}

}  // namespace

VoxelGrid::VoxelGrid(std::array<int, 3> d, Vec3 l, std::uint8_t fill) : dims(d), lengths(l) {
  for (int i = 0; i < 3; ++i) {
    if (dims[i] < 1) throw ConfigError("voxel grid dimensions must be >= 1");
    if (!(lengths[i] > 0.0)) throw ConfigError("cell lengths must be positive");
  }
  phase.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill);
}

Vec3 VoxelGrid::voxel_center(int i, int j, int k) const {
  return {(i + 0.5) * lengths[0] / dims[0], (j + 0.5) * lengths[1] / dims[1],
          (k + 0.5) * lengths[2] / dims[2]};
}

int VoxelGrid::max_phase() const {
  int m = 0;
  for (auto id : phase) m = std::max<int>(m, id);
  return m;
}

double VoxelGrid::volume_fraction(std::uint8_t id) const {
  if (phase.empty()) return 0.0;
  return static_cast<double>(std::count(phase.begin(), phase.end(), id)) /
         static_cast<double>(phase.size());
}

Laminate gen_laminate(std::array<int, 3> dims, double volume_fraction, int normal_axis,
                      Vec3 lengths) {
  if (normal_axis < 0 || normal_axis > 2) throw ConfigError("laminate normal axis must be 0, 1 or 2");
  if (!(volume_fraction >= 0.0 && volume_fraction <= 1.0)) {
    throw ConfigError("laminate volume fraction must lie in [0, 1]");
  }
  Laminate out{VoxelGrid(dims, lengths, 0), 0, 0.0};
  const int n = dims[normal_axis];
  out.layers = std::clamp(static_cast<int>(std::floor(volume_fraction * n + 0.5)), 0, n);
  out.realized_fraction = static_cast<double>(out.layers) / n;
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const int layer = normal_axis == 0 ? i : normal_axis == 1 ? j : k;
        if (layer < out.layers) out.grid.at(i, j, k) = 1;
      }
  return out;
}

VoxelGrid gen_spheres(std::array<int, 3> dims, const std::vector<Sphere>& spheres, Vec3 lengths,
                      std::uint8_t inclusion, std::uint8_t matrix) {
  VoxelGrid g(dims, lengths, matrix);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const Vec3 x = g.voxel_center(i, j, k);
        for (const auto& s : spheres) {
          if (s.radius > 0.0 && periodic_distance2(x, s.center, lengths) <= s.radius * s.radius) {
            g.at(i, j, k) = inclusion;
            break;
          }
        }
      }
  return g;
}

std::vector<Sphere> random_spheres(int count, double volume_fraction, std::uint64_t seed,
                                   Vec3 lengths, bool planar) {
  if (count < 0) throw ConfigError("sphere count must be non-negative");
  if (!(volume_fraction > 0.0 && volume_fraction < 1.0)) {
    throw ConfigError("sphere volume fraction must lie in (0, 1)");
  }
  if (count == 0) return {};
  double radius;
  if (planar) {
    radius = std::sqrt(volume_fraction * lengths[0] * lengths[1] / (count * std::numbers::pi));
  } else {
    radius = std::cbrt(volume_fraction * lengths[0] * lengths[1] * lengths[2] /
                       (count * 4.0 / 3.0 * std::numbers::pi));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Sphere> out;
  const double min_d2 = 4.0 * radius * radius;
  for (int attempt = 0; attempt < 100000 && static_cast<int>(out.size()) < count; ++attempt) {
    Sphere s{{unit(rng) * lengths[0], unit(rng) * lengths[1],
              planar ? 0.5 * lengths[2] : unit(rng) * lengths[2]},
             radius};
    bool clear = true;
    for (const auto& o : out) {
      if (periodic_distance2(s.center, o.center, lengths) < min_d2) {
        clear = false;
        break;
      }
    }
    if (clear) out.push_back(s);
  }
  if (static_cast<int>(out.size()) < count) {
    throw ConfigError("could not place " + std::to_string(count) +
                      " non-overlapping inclusions at the requested fraction");
  }
  return out;
}

std::vector<Sphere> four_spheres(double volume_fraction, Vec3 lengths) {
  const double volume = lengths[0] * lengths[1] * lengths[2];
  const double r = std::cbrt(volume_fraction * volume / (4.0 * 4.0 / 3.0 * std::numbers::pi));
  const std::array<Vec3, 4> unit{{{0.25, 0.25, 0.25},
                                  {0.75, 0.75, 0.25},
                                  {0.75, 0.25, 0.75},
                                  {0.25, 0.75, 0.75}}};
  std::vector<Sphere> out;
  for (const auto& c : unit) out.push_back({{c[0] * lengths[0], c[1] * lengths[1], c[2] * lengths[2]}, r});
  return out;
}

VoxelGrid gen_centered_cube(std::array<int, 3> dims, std::array<int, 3> inner_extent, Vec3 lengths,
                            std::uint8_t inner, std::uint8_t outer) {
  VoxelGrid g(dims, lengths, outer);
  std::array<int, 3> lo{}, hi{};
  for (int d = 0; d < 3; ++d) {
    const int n = std::clamp(inner_extent[d], 0, dims[d]);
    lo[d] = (dims[d] - n) / 2;
    hi[d] = lo[d] + n;
  }
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) g.at(i, j, k) = inner;
  return g;
}

std::string serialize_voxels(const VoxelGrid& grid, VoxelEncoding encoding) {
  std::ostringstream os;
  os.precision(17);
  os << "MPVX 1\n";
  os << "dims " << grid.dims[0] << ' ' << grid.dims[1] << ' ' << grid.dims[2] << '\n';
  os << "length " << grid.lengths[0] << ' ' << grid.lengths[1] << ' ' << grid.lengths[2] << '\n';
  os << "phases " << grid.max_phase() + 1 << '\n';
  if (encoding == VoxelEncoding::Ascii) {
    os << "data ascii\n";
    const int row = grid.dims[0];
    for (std::size_t i = 0; i < grid.phase.size(); ++i) {
      os << static_cast<int>(grid.phase[i]);
      os << (((i + 1) % row == 0) ? '\n' : ' ');
    }
  } else {
    os << "data binary\n";
    os.write(reinterpret_cast<const char*>(grid.phase.data()),
             static_cast<std::streamsize>(grid.phase.size()));
  }
  return os.str();
}

void save_voxels(const VoxelGrid& grid, const std::filesystem::path& path, VoxelEncoding encoding) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_voxels(grid, encoding);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

VoxelGrid parse_voxels(const std::string& bytes) {
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&](const char* what) {
    ++line_no;
    if (pos >= bytes.size()) {
      throw IoError("MPVX: missing header line " + std::to_string(line_no) + " (" + what + ")");
    }
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  auto malformed = [&](const std::string& line, const char* expected) {
    return IoError("MPVX: malformed header line " + std::to_string(line_no) + " '" + line +
                   "', expected '" + expected + "'");
  };

  {
    const std::string line = next_line("magic");
    std::istringstream is(line);
    std::string magic;
    std::string version;
    if (!(is >> magic >> version) || magic != "MPVX") throw malformed(line, "MPVX 1");
    if (version != "1") throw IoError("MPVX: unknown version '" + version + "', expected 1");
  }
  std::array<int, 3> dims{};
  Vec3 lengths{};
  int phases = 0;
  std::string encoding;
  {
    const std::string line = next_line("dims");
    std::istringstream is(line);
    std::string key, extra;
    if (!(is >> key >> dims[0] >> dims[1] >> dims[2]) || key != "dims" || (is >> extra) ||
        dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
      throw malformed(line, "dims N1 N2 N3");
    }
  }
  {
    const std::string line = next_line("length");
    std::istringstream is(line);
    std::string key, extra;
    if (!(is >> key >> lengths[0] >> lengths[1] >> lengths[2]) || key != "length" ||
        (is >> extra) || !(lengths[0] > 0 && lengths[1] > 0 && lengths[2] > 0)) {
      throw malformed(line, "length L1 L2 L3");
    }
  }
  {
    const std::string line = next_line("phases");
    std::istringstream is(line);
    std::string key, extra;
    if (!(is >> key >> phases) || key != "phases" || (is >> extra) || phases < 1 || phases > 256) {
      throw malformed(line, "phases P");
    }
  }
  {
    const std::string line = next_line("data");
    std::istringstream is(line);
    std::string key, extra;
    if (!(is >> key >> encoding) || key != "data" || (is >> extra) ||
        (encoding != "ascii" && encoding != "binary")) {
      throw malformed(line, "data ascii|binary");
    }
  }

  VoxelGrid grid(dims, lengths, 0);
  const std::size_t expected = grid.voxels();
  if (encoding == "binary") {
    const std::size_t found = bytes.size() >= pos ? bytes.size() - pos : 0;
    if (found != expected) {
      throw IoError("MPVX: payload holds " + std::to_string(found) + " phase IDs, expected " +
                    std::to_string(expected));
    }
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), grid.phase.begin());
  } else {
    std::istringstream is(bytes.substr(std::min(pos, bytes.size())));
    std::size_t found = 0;
    std::string token;
    while (is >> token) {
      char* end = nullptr;
      const long id = std::strtol(token.c_str(), &end, 10);
      if (*end != '\0' || id < 0 || id > 255) {
        throw IoError("MPVX: invalid phase ID '" + token + "' at position " + std::to_string(found));
      }
      if (found < expected) grid.phase[found] = static_cast<std::uint8_t>(id);
      ++found;
    }
    if (found != expected) {
      throw IoError("MPVX: payload holds " + std::to_string(found) + " phase IDs, expected " +
                    std::to_string(expected));
    }
  }
  for (std::size_t i = 0; i < grid.phase.size(); ++i) {
    if (grid.phase[i] >= phases) {
      throw IoError("MPVX: phase ID " + std::to_string(grid.phase[i]) + " at voxel " +
                    std::to_string(i) + " exceeds declared phase count " + std::to_string(phases));
    }
  }
  return grid;
}

VoxelGrid load_voxels(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open voxel file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_voxels(ss.str());
}

}  // namespace polarfft
