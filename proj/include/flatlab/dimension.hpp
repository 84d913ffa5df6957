#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "flatlab/common.hpp"
#include "flatlab/grassmann.hpp"

namespace flatlab {

/// Occupied dyadic cells of side 2^-level inside [0,1]^n. Cells are stored
/// as a flat, lexicographically sorted, duplicate-free array of coordinates.
class GridSet {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

  GridSet(int n, int level);
  /// `coords` holds n coordinates per cell; order and duplicates are fixed up.
  static GridSet from_cells(int n, int level, std::vector<std::uint32_t> coords);
  static GridSet full_cube(int n, int level);

  int dim() const { return n_; }
  int level() const { return level_; }
  std::size_t size() const { return n_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(n_); }
  bool empty() const { return coords_.empty(); }
  std::span<const std::uint32_t> cell(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  const std::vector<std::uint32_t>& coords() const { return coords_; }
  /// Center of cell i in [0,1]^n.
  Vector center(std::size_t i) const;

  /// Parent cells at a coarser level.
  GridSet downsample(int level) const;

  bool operator==(const GridSet& other) const = default;

 private:
  int n_;
  int level_;
  std::vector<std::uint32_t> coords_;
};

struct DimensionEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int level_min = 0;
  int level_max = 0;
  std::vector<std::uint64_t> counts;  // N(2^-l) for l in [level_min, level_max]
};

/// Occupied cells after downsampling to `level`.
std::uint64_t box_count(const GridSet& g, int level);

/// Least-squares slope of log2 N(2^-l) against l over [l_min, l_max].
DimensionEstimate estimate_dimension(const GridSet& g, int l_min, int l_max);
/// Default range: drops the two coarsest levels.
DimensionEstimate estimate_dimension(const GridSet& g);

/// Per-axis digit pattern for a base-b Cantor construction.
using DigitPattern = std::vector<int>;

/// Similarity dimension sum_i log|keep_i| / log(base).
double pattern_dimension(int base, const std::vector<DigitPattern>& keep);

/// Points whose base-b expansion along axis i uses only digits in keep[i],
/// truncated at `depth`, rasterized at the smallest dyadic level L with
/// 2^L >= base^depth. `keep` has n entries or one entry shared by all axes.
GridSet cantor_grid(int n, int base, const std::vector<DigitPattern>& keep, int depth);

/// Left corners of the depth-`depth` construction cells (exact digit points).
std::vector<Vector> cantor_points(int n, int base, const std::vector<DigitPattern>& keep, int depth);

/// Base-3 patterns over `axes` coordinates whose dimension is closest to
/// `target` among those with dimension in (lower, axes].
std::vector<DigitPattern> closest_base3_patterns(int axes, double target, double lower);

/// Rasterizes a point cloud after an isotropic rescale of its bounding box
/// onto [0,1]^d.
GridSet grid_from_points(const std::vector<Vector>& points, int level);
DimensionEstimate point_cloud_dimension(const std::vector<Vector>& points, int l_min, int l_max);

struct HyperplaneFamily {
  std::vector<AffineFlat> flats;
  std::string note;
};

struct SharpHyperplaneExample {
  GridSet set{1, 0};
  std::vector<Vector> points;  // exact construction points of F
  HyperplaneFamily family;
  double s_target = 0.0;
  double s_achieved = 0.0;
  int ceil_s = 0;
  int t = 0;  // n - 1 - ceil(s)
  std::vector<DigitPattern> keep;
};

/// F is a base-3 Cantor set in the first ceil(s) coordinates; the family is
/// `family_size` Haar-random hyperplanes containing that coordinate subspace.
SharpHyperplaneExample sharp_hyperplane_example(int n, double s, int depth, int family_size = 1000,
                                                Seed seed = 0);

struct SlicingProductExample {
  GridSet set{1, 0};
  double s_achieved = 0.0;          // dimension of the Cantor factor
  double expected_dimension = 0.0;  // n - k + s_achieved
  std::vector<DigitPattern> keep;
};

/// Cantor set of dimension close to s in the first k coordinates times the
/// full cube in the remaining n-k.
SlicingProductExample slicing_product_example(int n, int k, double s, int depth);

/// Cells of g whose centers are within rho of W, in k-dimensional flat
/// coordinates. The result has level g.level() + flat_slice_level_shift(n)
/// so that its cells have the same side length as g's.
GridSet flat_slice(const GridSet& g, const AffineFlat& w, double rho);
int flat_slice_level_shift(int n);

using FlatLike = std::variant<Subspace, AffineFlat>;

/// Box dimension of a family of subspaces (projector entries) or affine flats
/// (projector entries plus offset) in the max norm.
DimensionEstimate family_dimension(const std::vector<Subspace>& flats, int l_min, int l_max);
DimensionEstimate family_dimension(const std::vector<AffineFlat>& flats, int l_min, int l_max);
DimensionEstimate family_dimension(const std::vector<FlatLike>& flats, int l_min, int l_max);

/// Upper triangle of the projector, row-major.
Vector projector_embedding(const Subspace& u);

void write_csv(const GridSet& g, std::ostream& out);
GridSet read_csv(std::istream& in, int level);

/// Binary layout: "GSET", u8 version, u8 n, u8 level, u64 run count, then for
/// each run of consecutive linear indices a LEB128 gap and LEB128 length.
/// Requires n * level <= 64.
void write_binary(const GridSet& g, std::ostream& out);
GridSet read_binary(std::istream& in);

nlohmann::ordered_json to_json(const DimensionEstimate& e);

}  // namespace flatlab
