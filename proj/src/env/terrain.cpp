#include "auv/env/terrain.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <queue>

namespace auv::env {

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Coast: return "coast";
    case CellClass::Water: return "water";
    case CellClass::Uncertain: return "uncertain";
  }
  return "?";
}

TerrainGrid::TerrainGrid(std::size_t rows, std::size_t cols, double cell_size_m, double depth_m,
                         std::vector<CellClass> cells)
    : rows_(rows), cols_(cols), cell_size_m_(cell_size_m), depth_m_(depth_m), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0) throw InvalidInput("terrain grid must have at least one cell");
  if (!(cell_size_m_ > 0.0)) throw InvalidInput("terrain cell size must be positive");
  if (!(depth_m_ > 0.0)) throw InvalidInput("terrain depth must be positive");
  if (cells_.size() != rows_ * cols_) throw InvalidInput("terrain cell count does not match rows*cols");
  for (auto c : cells_) {
    if (static_cast<std::uint8_t>(c) > 2) throw InvalidInput("terrain cell class out of range");
  }
}

TerrainGrid TerrainGrid::uniform(std::size_t rows, std::size_t cols, double cell_size_m,
                                 double depth_m, CellClass cls) {
  return TerrainGrid(rows, cols, cell_size_m, depth_m, std::vector<CellClass>(rows * cols, cls));
}

bool TerrainGrid::contains(double x, double y) const {
  return x >= 0.0 && y >= 0.0 && x <= width_m() && y <= height_m();
}

CellClass TerrainGrid::class_at(double x, double y) const {
  if (!contains(x, y)) throw std::out_of_range("terrain query outside the plan area");
  auto col = std::min(cols_ - 1, static_cast<std::size_t>(x / cell_size_m_));
  auto row = std::min(rows_ - 1, static_cast<std::size_t>(y / cell_size_m_));
  return at(row, col);
}

double TerrainGrid::fraction(CellClass cls) const {
  auto n = std::count(cells_.begin(), cells_.end(), cls);
  return static_cast<double>(n) / static_cast<double>(cells_.size());
}

bool is_legal(const TerrainGrid& grid, const Vec3& p) {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y()) || !std::isfinite(p.z())) return false;
  if (p.z() < 0.0 || p.z() > grid.depth_m()) return false;
  if (!grid.contains(p.x(), p.y())) return false;
  return grid.class_at(p.x(), p.y()) == CellClass::Water;
}

bool segment_is_clear(const TerrainGrid& grid, const Vec3& a, const Vec3& b) {
  double len = (b - a).norm();
  auto steps = static_cast<int>(std::ceil(len / (0.5 * grid.cell_size_m())));
  steps = std::max(steps, 1);
  for (int i = 0; i <= steps; ++i) {
    double s = static_cast<double>(i) / steps;
    if (!is_legal(grid, a + s * (b - a))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

using Color = std::array<double, 3>;

std::uint32_t pack(const Rgb& c) {
  return (std::uint32_t{c[0]} << 16) | (std::uint32_t{c[1]} << 8) | std::uint32_t{c[2]};
}

Color to_color(std::uint32_t key) {
  return {static_cast<double>((key >> 16) & 0xFF), static_cast<double>((key >> 8) & 0xFF),
          static_cast<double>(key & 0xFF)};
}

Color to_color(const Rgb& c) {
  return {static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
}

double dist2(const Color& a, const Color& b) {
  double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

}  // namespace

ColorClusters kmeans_colors(const Raster& raster, const ClusterOptions& opts) {
  if (opts.k < 2) throw InvalidInput("k-means needs k >= 2");
  if (raster.pixels.size() != raster.rows * raster.cols) throw InvalidInput("raster size mismatch");
  if (raster.pixels.empty()) throw InvalidInput("raster is empty");
  const auto k = static_cast<std::size_t>(opts.k);
  if (raster.pixels.size() < k) {
    throw DegenerateClustering("raster has fewer pixels than requested clusters");
  }

  // Cluster the distinct colors weighted by multiplicity; equivalent to
  // per-pixel Lloyd iterations and independent of raster size.
  std::vector<std::uint32_t> keys(raster.pixels.size());
  std::transform(raster.pixels.begin(), raster.pixels.end(), keys.begin(), pack);
  std::vector<std::uint32_t> distinct = keys;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> weight(distinct.size(), 0.0);
  for (auto key : keys) {
    auto idx = std::lower_bound(distinct.begin(), distinct.end(), key) - distinct.begin();
    weight[static_cast<std::size_t>(idx)] += 1.0;
  }

  // k-means++ seeding over the distinct colors (weighted by multiplicity).
  Rng rng(opts.seed);
  ColorClusters out;
  out.centroids.assign(k, Color{0, 0, 0});
  std::vector<bool> live(k, false);
  std::vector<double> d2(distinct.size(), kInf);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> score(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) score[i] = c == 0 ? weight[i] : weight[i] * d2[i];
    double total = std::accumulate(score.begin(), score.end(), 0.0);
    if (!(total > 0.0)) break;  // every distinct color already is a centroid
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = 0;
    for (std::size_t i = 0; i < score.size(); ++i) {
      if (score[i] <= 0.0) continue;
      pick = i;
      if (r < score[i]) break;
      r -= score[i];
    }
    out.centroids[c] = to_color(distinct[pick]);
    live[c] = true;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      d2[i] = std::min(d2[i], dist2(to_color(distinct[i]), out.centroids[c]));
    }
  }

  std::vector<int> assign(distinct.size(), 0);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    out.iterations = iter + 1;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      Color col = to_color(distinct[i]);
      int best = -1;
      double best_d = kInf;
      for (std::size_t c = 0; c < k; ++c) {
        if (!live[c]) continue;
        double d = dist2(col, out.centroids[c]);
        if (d < best_d) {  // strict: lowest index wins ties
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      assign[i] = best;
    }
    std::vector<Color> sum(k, Color{0, 0, 0});
    std::vector<double> mass(k, 0.0);
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      auto c = static_cast<std::size_t>(assign[i]);
      Color col = to_color(distinct[i]);
      for (int d = 0; d < 3; ++d) sum[c][d] += weight[i] * col[d];
      mass[c] += weight[i];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] == 0.0) continue;  // keeps its previous centroid
      Color next{sum[c][0] / mass[c], sum[c][1] / mass[c], sum[c][2] / mass[c]};
      moved = std::max(moved, std::sqrt(dist2(next, out.centroids[c])));
      out.centroids[c] = next;
    }
    if (moved < opts.tolerance) break;
  }

  out.sizes.assign(k, 0);
  out.labels.resize(keys.size());
  for (std::size_t p = 0; p < keys.size(); ++p) {
    auto idx = std::lower_bound(distinct.begin(), distinct.end(), keys[p]) - distinct.begin();
    int c = assign[static_cast<std::size_t>(idx)];
    out.labels[p] = c;
    ++out.sizes[static_cast<std::size_t>(c)];
  }
  return out;
}

TerrainGrid cluster_map(const Raster& raster, const ClusterOptions& opts) {
  ColorClusters clusters = kmeans_colors(raster, opts);
  const std::size_t k = clusters.centroids.size();

  std::vector<CellClass> label_class(k, CellClass::Uncertain);
  const Color refs[2] = {to_color(opts.references.water), to_color(opts.references.land)};
  const CellClass ref_class[2] = {CellClass::Water, CellClass::Coast};

  // Closest (cluster, reference) pair is fixed first, then the other
  // reference takes its nearest remaining cluster.
  std::vector<bool> taken(k, false);
  bool ref_done[2] = {false, false};
  for (int round = 0; round < 2; ++round) {
    double best_d = kInf;
    int best_c = -1, best_r = -1;
    for (int r = 0; r < 2; ++r) {
      if (ref_done[r]) continue;
      for (std::size_t c = 0; c < k; ++c) {
        if (taken[c] || clusters.sizes[c] == 0) continue;
        double d = dist2(clusters.centroids[c], refs[r]);
        if (d < best_d) {
          best_d = d;
          best_c = static_cast<int>(c);
          best_r = r;
        }
      }
    }
    if (best_c < 0) break;
    taken[static_cast<std::size_t>(best_c)] = true;
    ref_done[best_r] = true;
    label_class[static_cast<std::size_t>(best_c)] = ref_class[best_r];
  }

  std::vector<CellClass> cells(clusters.labels.size());
  for (std::size_t p = 0; p < cells.size(); ++p) {
    cells[p] = label_class[static_cast<std::size_t>(clusters.labels[p])];
  }
  return TerrainGrid(raster.rows, raster.cols, opts.cell_size_m, opts.depth_m, std::move(cells));
}

Raster render(const TerrainGrid& grid, const ClassPalette& palette) {
  Raster out;
  out.rows = grid.rows();
  out.cols = grid.cols();
  out.pixels.reserve(grid.cells().size());
  for (auto c : grid.cells()) {
    switch (c) {
      case CellClass::Water: out.pixels.push_back(palette.water); break;
      case CellClass::Coast: out.pixels.push_back(palette.land); break;
      case CellClass::Uncertain: out.pixels.push_back(palette.uncertain); break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic terrain

namespace {

struct Island {
  Vec2 center;
  double radius;
  std::array<double, 3> amp;
  std::array<double, 3> phase;

  double boundary(double angle) const {
    double r = 1.0;
    for (int h = 0; h < 3; ++h) r += amp[h] * std::cos((h + 2) * angle + phase[h]);
    return radius * r;
  }
};

std::vector<CellClass> paint_islands(const TerrainParams& p, std::uint64_t seed) {
  Rng rng(seed);
  const double width = static_cast<double>(p.cols) * p.cell_size_m;
  const double height = static_cast<double>(p.rows) * p.cell_size_m;
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
  std::normal_distribution<double> radius(p.island_radius_mean_m,
                                          std::max(p.island_radius_std_m, 1e-12));
  std::uniform_real_distribution<double> amp(-0.15, 0.15), phase(0.0, 2.0 * std::numbers::pi);

  std::vector<Island> islands;
  for (int i = 0; i < p.island_count; ++i) {
    Island is;
    is.center = Vec2(ux(rng), uy(rng));
    double r = p.island_radius_std_m > 0.0 ? radius(rng) : p.island_radius_mean_m;
    is.radius = std::max(r, 2.0 * p.cell_size_m);
    for (int h = 0; h < 3; ++h) {
      is.amp[h] = amp(rng);
      is.phase[h] = phase(rng);
    }
    islands.push_back(is);
  }

  std::vector<CellClass> cells(p.rows * p.cols, CellClass::Water);
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < p.cols; ++c) {
      Vec2 q((static_cast<double>(c) + 0.5) * p.cell_size_m,
             (static_cast<double>(r) + 0.5) * p.cell_size_m);
      CellClass cls = CellClass::Water;
      for (const auto& is : islands) {
        Vec2 d = q - is.center;
        double bound = is.boundary(std::atan2(d.y(), d.x()));
        double dist = d.norm();
        if (dist <= bound) {
          cls = CellClass::Coast;
          break;
        }
        if (dist <= bound + p.uncertain_margin_m) cls = CellClass::Uncertain;
      }
      cells[r * p.cols + c] = cls;
    }
  }
  return cells;
}

// Water outside the largest 4-connected water body becomes Coast.
void keep_largest_water_body(std::vector<CellClass>& cells, std::size_t rows, std::size_t cols) {
  std::vector<int> comp(cells.size(), -1);
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < cells.size(); ++start) {
    if (cells[start] != CellClass::Water || comp[start] >= 0) continue;
    int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    std::queue<std::size_t> q;
    q.push(start);
    comp[start] = id;
    while (!q.empty()) {
      auto cur = q.front();
      q.pop();
      ++count;
      std::size_t r = cur / cols, c = cur % cols;
      auto visit = [&](std::size_t nr, std::size_t nc) {
        auto n = nr * cols + nc;
        if (cells[n] == CellClass::Water && comp[n] < 0) {
          comp[n] = id;
          q.push(n);
        }
      };
      if (r > 0) visit(r - 1, c);
      if (r + 1 < rows) visit(r + 1, c);
      if (c > 0) visit(r, c - 1);
      if (c + 1 < cols) visit(r, c + 1);
    }
    sizes.push_back(count);
  }
  if (sizes.empty()) return;
  int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] == CellClass::Water && comp[i] != largest) cells[i] = CellClass::Coast;
  }
}

}  // namespace

TerrainGrid generate_synthetic_terrain(std::uint64_t seed, const TerrainParams& params) {
  if (params.rows == 0 || params.cols == 0) throw InvalidInput("terrain needs rows, cols >= 1");
  if (params.island_count < 0) throw InvalidInput("island_count must be >= 0");
  if (!(params.island_radius_mean_m > 0.0) || params.island_radius_std_m < 0.0 ||
      params.uncertain_margin_m < 0.0) {
    throw InvalidInput("island radius parameters must be positive");
  }
  const double area = static_cast<double>(params.rows * params.cols) * params.cell_size_m *
                      params.cell_size_m;
  const double r = params.island_radius_mean_m + params.uncertain_margin_m;
  const double expected_land =
      params.island_count * std::numbers::pi *
      (r * r + params.island_radius_std_m * params.island_radius_std_m) / area;
  if (expected_land > 0.9) {
    throw InfeasibleTerrain("island parameters leave less than 10% water");
  }

  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    auto cells = paint_islands(params, derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    keep_largest_water_body(cells, params.rows, params.cols);
    TerrainGrid grid(params.rows, params.cols, params.cell_size_m, params.depth_m, std::move(cells));
    if (grid.fraction(CellClass::Water) >= params.min_water_fraction) return grid;
  }
  throw InfeasibleTerrain("could not generate a connected water body of the requested size");
}

// ---------------------------------------------------------------------------
// Raster I/O

void write_class_pgm(const TerrainGrid& grid, std::ostream& out) {
  out << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  for (auto c : grid.cells()) out.put(static_cast<char>(c));
}

void write_ppm(const Raster& raster, std::ostream& out) {
  out << "P6\n" << raster.cols << ' ' << raster.rows << "\n255\n";
  for (const auto& px : raster.pixels) {
    out.put(static_cast<char>(px[0]));
    out.put(static_cast<char>(px[1]));
    out.put(static_cast<char>(px[2]));
  }
}

namespace {

long read_header_int(std::istream& in) {
  int ch;
  while ((ch = in.peek()) != EOF) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  long v = -1;
  if (!(in >> v) || v < 0) throw std::runtime_error("malformed PPM header");
  return v;
}

}  // namespace

Raster read_ppm(std::istream& in) {
  std::string magic(2, '\0');
  if (!in.read(magic.data(), 2) || magic != "P6") throw std::runtime_error("not a binary PPM (P6)");
  long cols = read_header_int(in);
  long rows = read_header_int(in);
  long maxval = read_header_int(in);
  if (cols == 0 || rows == 0) throw std::runtime_error("PPM has zero size");
  if (maxval != 255) throw std::runtime_error("only 8-bit PPM is supported");
  if (cols > 100000 || rows > 100000) throw std::runtime_error("PPM too large");
  in.get();  // single whitespace before the pixel block
  Raster r;
  r.rows = static_cast<std::size_t>(rows);
  r.cols = static_cast<std::size_t>(cols);
  r.pixels.resize(r.rows * r.cols);
  for (auto& px : r.pixels) {
    char buf[3];
    if (!in.read(buf, 3)) throw std::runtime_error("truncated PPM pixel data");
    px = {static_cast<std::uint8_t>(buf[0]), static_cast<std::uint8_t>(buf[1]),
          static_cast<std::uint8_t>(buf[2])};
  }
  return r;
}

}  // namespace auv::env
