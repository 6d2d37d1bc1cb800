#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "auv/common.h"

namespace auv::env {

// Byte values double as the exported raster encoding.
enum class CellClass : std::uint8_t { Coast = 0, Water = 1, Uncertain = 2 };

const char* to_string(CellClass c);

class DegenerateClustering : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleTerrain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Square-cell classification grid over the operating volume. Cell (row, col)
// covers x in [col*cell, (col+1)*cell), y in [row*cell, (row+1)*cell); the far
// edges x == width and y == height belong to the last column/row.
class TerrainGrid {
 public:
  TerrainGrid(std::size_t rows, std::size_t cols, double cell_size_m, double depth_m,
              std::vector<CellClass> cells);

  static TerrainGrid uniform(std::size_t rows, std::size_t cols, double cell_size_m,
                             double depth_m, CellClass cls);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double cell_size_m() const { return cell_size_m_; }
  double width_m() const { return static_cast<double>(cols_) * cell_size_m_; }
  double height_m() const { return static_cast<double>(rows_) * cell_size_m_; }
  double depth_m() const { return depth_m_; }

  bool contains(double x, double y) const;
  // Throws std::out_of_range outside the plan area.
  CellClass class_at(double x, double y) const;
  CellClass at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  std::span<const CellClass> cells() const { return cells_; }

  double fraction(CellClass cls) const;

  bool operator==(const TerrainGrid&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  double cell_size_m_;
  double depth_m_;
  std::vector<CellClass> cells_;
};

// Water cell and 0 <= z <= depth. Anything outside the volume is illegal.
bool is_legal(const TerrainGrid& grid, const Vec3& p);

// True when every sample along the straight segment a-b is legal.
bool segment_is_clear(const TerrainGrid& grid, const Vec3& a, const Vec3& b);

using Rgb = std::array<std::uint8_t, 3>;

struct Raster {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rgb> pixels;  // row-major

  const Rgb& at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  bool operator==(const Raster&) const = default;
};

struct ClassPalette {
  Rgb water{0, 0, 255};
  Rgb land{139, 90, 43};
  Rgb uncertain{128, 128, 128};
};

struct ClusterOptions {
  int k = 3;
  std::uint64_t seed = 0;
  int max_iterations = 100;
  double tolerance = 1e-6;
  ClassPalette references;
  double cell_size_m = 100.0;
  double depth_m = 100.0;
};

struct ColorClusters {
  std::vector<int> labels;                      // per pixel
  std::vector<std::array<double, 3>> centroids;  // size k
  std::vector<std::size_t> sizes;               // pixels per cluster; 0 = empty
  int iterations = 0;
};

// Lloyd's k-means over pixel colors. Initial centroids are distinct colors
// chosen by seeded k-means++; when fewer than k distinct colors exist the
// surplus clusters stay empty.
ColorClusters kmeans_colors(const Raster& raster, const ClusterOptions& opts);

// k-means followed by reference-color labelling: Water and Coast go to the
// clusters nearest their reference colors (closest pair resolved first),
// everything else is Uncertain.
TerrainGrid cluster_map(const Raster& raster, const ClusterOptions& opts = {});

Raster render(const TerrainGrid& grid, const ClassPalette& palette = {});

struct TerrainParams {
  std::size_t rows = 100;
  std::size_t cols = 100;
  double cell_size_m = 100.0;
  double depth_m = 100.0;
  int island_count = 5;
  double island_radius_mean_m = 700.0;
  double island_radius_std_m = 250.0;
  double uncertain_margin_m = 100.0;
  double min_water_fraction = 0.5;

  bool operator==(const TerrainParams&) const = default;
};

// Procedural island map. Water not connected to the largest water body is
// filled in as Coast so the legal region is a single component.
TerrainGrid generate_synthetic_terrain(std::uint64_t seed, const TerrainParams& params);

// One byte per cell (0 Coast, 1 Water, 2 Uncertain) as binary PGM, row 0 first.
void write_class_pgm(const TerrainGrid& grid, std::ostream& out);
void write_ppm(const Raster& raster, std::ostream& out);
Raster read_ppm(std::istream& in);

}  // namespace auv::env
