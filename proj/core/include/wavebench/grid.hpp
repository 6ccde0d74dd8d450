#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavebench/error.hpp"

namespace wavebench {

using index_t = std::int64_t;

/// Point counts along X, Y, Z.
struct Extent3 {
  index_t x = 1;
  index_t y = 1;
  index_t z = 1;

  [[nodiscard]] constexpr index_t volume() const noexcept { return x * y * z; }
  friend constexpr bool operator==(const Extent3&, const Extent3&) = default;
};

/// Interior coordinates; negative values and values past the extent address the halo.
struct Index3 {
  index_t i = 0;
  index_t j = 0;
  index_t k = 0;

  friend constexpr bool operator==(const Index3&, const Index3&) = default;
};

/// Grid spacing per axis, in length units.
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  friend constexpr bool operator==(const Spacing&, const Spacing&) = default;
};

enum class HaloPolicy { Zero, Periodic };

namespace detail {
std::size_t checked_padded_size(Extent3 interior, index_t halo, std::size_t element_size,
                                std::size_t max_elements);
void validate_grid_args(Extent3 interior, index_t halo, Spacing spacing);
}  // namespace detail

/// Scalar field on an nx*ny*nz interior surrounded by a halo of width R on every side.
///
/// Storage is a single flat array with X fastest-varying, then Y, then Z. Interior point
/// (0,0,0) sits at padded coordinate (R,R,R); the halo corner (-R,-R,-R) is offset 0.
template <class T>
class BasicGrid {
 public:
  using value_type = T;

  BasicGrid() = default;

  BasicGrid(Extent3 interior, index_t halo, Spacing spacing, T fill = T{})
      : interior_(interior), halo_(halo), spacing_(spacing) {
    detail::validate_grid_args(interior, halo, spacing);
    const std::size_t n =
        detail::checked_padded_size(interior, halo, sizeof(T), values_.max_size());
    padded_ = {interior.x + 2 * halo, interior.y + 2 * halo, interior.z + 2 * halo};
    try {
      values_.assign(n, fill);
    } catch (const std::bad_alloc&) {
      throw CapacityError("grid allocation of " + std::to_string(n) + " elements failed");
    }
  }

  [[nodiscard]] Extent3 interior() const noexcept { return interior_; }
  [[nodiscard]] Extent3 padded() const noexcept { return padded_; }
  [[nodiscard]] index_t nx() const noexcept { return interior_.x; }
  [[nodiscard]] index_t ny() const noexcept { return interior_.y; }
  [[nodiscard]] index_t nz() const noexcept { return interior_.z; }
  [[nodiscard]] index_t halo() const noexcept { return halo_; }
  [[nodiscard]] Spacing spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] index_t stride_y() const noexcept { return padded_.x; }
  [[nodiscard]] index_t stride_z() const noexcept { return padded_.x * padded_.y; }

  [[nodiscard]] std::span<T> values() noexcept { return values_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return values_; }
  [[nodiscard]] T* data() noexcept { return values_.data(); }
  [[nodiscard]] const T* data() const noexcept { return values_.data(); }

  [[nodiscard]] bool contains(index_t i, index_t j, index_t k) const noexcept {
    return i >= -halo_ && i < interior_.x + halo_ && j >= -halo_ && j < interior_.y + halo_ &&
           k >= -halo_ && k < interior_.z + halo_;
  }

  [[nodiscard]] bool in_interior(index_t i, index_t j, index_t k) const noexcept {
    return i >= 0 && i < interior_.x && j >= 0 && j < interior_.y && k >= 0 && k < interior_.z;
  }

  /// Unchecked offset of (i,j,k).
  [[nodiscard]] index_t offset(index_t i, index_t j, index_t k) const noexcept {
    return ((k + halo_) * padded_.y + (j + halo_)) * padded_.x + (i + halo_);
  }

  /// Checked offset of (i,j,k); throws BoundsError outside [-R, n+R).
  [[nodiscard]] std::size_t flat_index(index_t i, index_t j, index_t k) const {
    if (!contains(i, j, k)) {
      throw BoundsError("index (" + std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k) + ") outside grid with halo " +
                        std::to_string(halo_));
    }
    return static_cast<std::size_t>(offset(i, j, k));
  }

  /// Inverse of flat_index.
  [[nodiscard]] Index3 coords(std::size_t flat) const {
    if (flat >= values_.size()) {
      throw BoundsError("flat offset " + std::to_string(flat) + " past end of grid");
    }
    const auto f = static_cast<index_t>(flat);
    const index_t x = f % padded_.x;
    const index_t y = (f / padded_.x) % padded_.y;
    const index_t z = f / (padded_.x * padded_.y);
    return {x - halo_, y - halo_, z - halo_};
  }

  T& operator()(index_t i, index_t j, index_t k) noexcept { return values_[offset(i, j, k)]; }
  const T& operator()(index_t i, index_t j, index_t k) const noexcept {
    return values_[offset(i, j, k)];
  }

  T& at(index_t i, index_t j, index_t k) { return values_[flat_index(i, j, k)]; }
  const T& at(index_t i, index_t j, index_t k) const { return values_[flat_index(i, j, k)]; }

  [[nodiscard]] bool same_shape(const BasicGrid& other) const noexcept {
    return interior_ == other.interior_ && halo_ == other.halo_;
  }

  void fill(T value) { std::fill(values_.begin(), values_.end(), value); }

  /// Overwrites every halo cell: zero, or the periodic image of the interior.
  void fill_halo(HaloPolicy policy) {
    const auto wrap = [](index_t v, index_t n) { return ((v % n) + n) % n; };
    for (index_t k = -halo_; k < interior_.z + halo_; ++k) {
      for (index_t j = -halo_; j < interior_.y + halo_; ++j) {
        for (index_t i = -halo_; i < interior_.x + halo_; ++i) {
          if (in_interior(i, j, k)) {
            i = interior_.x - 1;  // skip the interior run of this row
            continue;
          }
          (*this)(i, j, k) = policy == HaloPolicy::Zero
                                 ? T{}
                                 : (*this)(wrap(i, interior_.x), wrap(j, interior_.y),
                                           wrap(k, interior_.z));
        }
      }
    }
  }

 private:
  Extent3 interior_{};
  Extent3 padded_{0, 0, 0};
  index_t halo_ = 0;
  Spacing spacing_{};
  std::vector<T> values_;
};

using Grid3D = BasicGrid<double>;
using Grid3Df = BasicGrid<float>;

template <class T = double>
[[nodiscard]] BasicGrid<T> create_grid(Extent3 interior, index_t halo, Spacing spacing,
                                       T fill = T{}) {
  return BasicGrid<T>(interior, halo, spacing, fill);
}

// ---------------------------------------------------------------------------
// Decomposition into inner blocks and boundary shells.

/// Which part of the domain a tile belongs to. Boundary tags name the face slab.
enum class Region : std::uint8_t { Inner, ZLow, ZHigh, YLow, YHigh, XLow, XHigh };

[[nodiscard]] std::string_view to_string(Region region) noexcept;
[[nodiscard]] inline bool is_boundary(Region region) noexcept { return region != Region::Inner; }

struct Tile {
  Index3 origin{};
  Extent3 dims{};
  Region region = Region::Inner;

  [[nodiscard]] index_t volume() const noexcept { return dims.volume(); }
  [[nodiscard]] bool contains(Index3 p) const noexcept {
    return p.i >= origin.i && p.i < origin.i + dims.x && p.j >= origin.j &&
           p.j < origin.j + dims.y && p.k >= origin.k && p.k < origin.k + dims.z;
  }
  friend bool operator==(const Tile&, const Tile&) = default;
};

[[nodiscard]] bool tiles_overlap(const Tile& a, const Tile& b) noexcept;

enum class TileMode { Blocks3D, Planes25D };

[[nodiscard]] std::string_view to_string(TileMode mode) noexcept;

struct TilePlan {
  std::vector<Tile> tiles;
  TileMode mode = TileMode::Blocks3D;
  Extent3 interior{};
  index_t boundary_width = 0;

  [[nodiscard]] std::size_t inner_count() const noexcept;
  [[nodiscard]] std::size_t boundary_count() const noexcept {
    return tiles.size() - inner_count();
  }
};

/// Splits the interior into inner tiles plus six face shells of width `boundary_width`.
///
/// Inner tiles are `block` sized 3D blocks (Blocks3D) or full-Z columns of block.x*block.y
/// (Planes25D, block.z ignored); edge tiles are clamped. Shells meet at edges and corners
/// with priority Z faces, then Y, then X.
[[nodiscard]] TilePlan decompose(Extent3 interior, TileMode mode, Extent3 block,
                                 index_t boundary_width);

template <class T>
[[nodiscard]] TilePlan decompose(const BasicGrid<T>& grid, TileMode mode, Extent3 block,
                                 index_t boundary_width) {
  return decompose(grid.interior(), mode, block, boundary_width);
}

/// Cuts a tile into sub-blocks of at most `block`, X fastest then Y then Z.
[[nodiscard]] std::vector<Tile> split_tile(const Tile& tile, Extent3 block);

}  // namespace wavebench
