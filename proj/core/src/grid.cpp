#include "wavebench/grid.hpp"

#include <array>
#include <cmath>

namespace wavebench {

namespace detail {

void validate_grid_args(Extent3 interior, index_t halo, Spacing spacing) {
  if (interior.x < 1 || interior.y < 1 || interior.z < 1) {
    throw DimensionError("grid extents must be >= 1, got " + std::to_string(interior.x) + "x" +
                         std::to_string(interior.y) + "x" + std::to_string(interior.z));
  }
  if (halo < 0) {
    throw DimensionError("halo width must be >= 0, got " + std::to_string(halo));
  }
  const auto positive = [](double h) { return std::isfinite(h) && h > 0.0; };
  if (!positive(spacing.x) || !positive(spacing.y) || !positive(spacing.z)) {
    throw DimensionError("grid spacing must be finite and > 0");
  }
}

std::size_t checked_padded_size(Extent3 interior, index_t halo, std::size_t element_size,
                                std::size_t max_elements) {
  const std::array<index_t, 3> extents{interior.x, interior.y, interior.z};
  std::size_t total = 1;
  for (const index_t n : extents) {
    index_t padded = 0;
    if (__builtin_mul_overflow(halo, index_t{2}, &padded) ||
        __builtin_add_overflow(padded, n, &padded)) {
      throw CapacityError("padded extent overflows");
    }
    if (__builtin_mul_overflow(total, static_cast<std::size_t>(padded), &total)) {
      throw CapacityError("grid point count overflows size_t");
    }
  }
  std::size_t bytes = 0;
  if (total > max_elements || __builtin_mul_overflow(total, element_size, &bytes)) {
    throw CapacityError("grid of " + std::to_string(total) + " points exceeds platform limits");
  }
  return total;
}

}  // namespace detail

std::string_view to_string(Region region) noexcept {
  switch (region) {
    case Region::Inner: return "inner";
    case Region::ZLow: return "z-low";
    case Region::ZHigh: return "z-high";
    case Region::YLow: return "y-low";
    case Region::YHigh: return "y-high";
    case Region::XLow: return "x-low";
    case Region::XHigh: return "x-high";
  }
  return "unknown";
}

std::string_view to_string(TileMode mode) noexcept {
  return mode == TileMode::Blocks3D ? "blocks3d" : "planes25d";
}

bool tiles_overlap(const Tile& a, const Tile& b) noexcept {
  const auto overlap_1d = [](index_t a0, index_t an, index_t b0, index_t bn) {
    return a0 < b0 + bn && b0 < a0 + an;
  };
  return overlap_1d(a.origin.i, a.dims.x, b.origin.i, b.dims.x) &&
         overlap_1d(a.origin.j, a.dims.y, b.origin.j, b.dims.y) &&
         overlap_1d(a.origin.k, a.dims.z, b.origin.k, b.dims.z);
}

std::size_t TilePlan::inner_count() const noexcept {
  std::size_t n = 0;
  for (const Tile& t : tiles) {
    n += t.region == Region::Inner ? 1 : 0;
  }
  return n;
}

std::vector<Tile> split_tile(const Tile& tile, Extent3 block) {
  if (block.x < 1 || block.y < 1 || block.z < 1) {
    throw DimensionError("block extents must be >= 1");
  }
  std::vector<Tile> out;
  for (index_t k = 0; k < tile.dims.z; k += block.z) {
    for (index_t j = 0; j < tile.dims.y; j += block.y) {
      for (index_t i = 0; i < tile.dims.x; i += block.x) {
        out.push_back(Tile{
            {tile.origin.i + i, tile.origin.j + j, tile.origin.k + k},
            {std::min(block.x, tile.dims.x - i), std::min(block.y, tile.dims.y - j),
             std::min(block.z, tile.dims.z - k)},
            tile.region});
      }
    }
  }
  return out;
}

TilePlan decompose(Extent3 interior, TileMode mode, Extent3 block, index_t boundary_width) {
  if (interior.x < 1 || interior.y < 1 || interior.z < 1) {
    throw DimensionError("cannot decompose an empty interior");
  }
  if (block.x < 1 || block.y < 1 || (mode == TileMode::Blocks3D && block.z < 1)) {
    throw DimensionError("block extents must be >= 1");
  }
  const index_t w = boundary_width;
  if (w < 0) {
    throw DecompositionError("boundary width must be >= 0");
  }
  if (2 * w >= interior.x || 2 * w >= interior.y || 2 * w >= interior.z) {
    throw DecompositionError("boundary width " + std::to_string(w) +
                             " leaves no inner region");
  }

  TilePlan plan;
  plan.mode = mode;
  plan.interior = interior;
  plan.boundary_width = w;

  const Tile inner{{w, w, w}, {interior.x - 2 * w, interior.y - 2 * w, interior.z - 2 * w},
                   Region::Inner};
  const Extent3 inner_block =
      mode == TileMode::Blocks3D ? block : Extent3{block.x, block.y, inner.dims.z};
  plan.tiles = split_tile(inner, inner_block);

  if (w > 0) {
    const index_t nx = interior.x;
    const index_t ny = interior.y;
    const index_t nz = interior.z;
    plan.tiles.push_back({{0, 0, 0}, {nx, ny, w}, Region::ZLow});
    plan.tiles.push_back({{0, 0, nz - w}, {nx, ny, w}, Region::ZHigh});
    plan.tiles.push_back({{0, 0, w}, {nx, w, nz - 2 * w}, Region::YLow});
    plan.tiles.push_back({{0, ny - w, w}, {nx, w, nz - 2 * w}, Region::YHigh});
    plan.tiles.push_back({{0, w, w}, {w, ny - 2 * w, nz - 2 * w}, Region::XLow});
    plan.tiles.push_back({{nx - w, w, w}, {w, ny - 2 * w, nz - 2 * w}, Region::XHigh});
  }
  return plan;
}

}  // namespace wavebench
