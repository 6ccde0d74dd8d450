#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wavebench/grid.hpp"
#include "wavebench/stencil.hpp"

namespace wavebench {

struct Extent2 {
  index_t x = 1;
  index_t y = 1;

  friend constexpr bool operator==(const Extent2&, const Extent2&) = default;
};

/// Stencil read straight from the source grid.
struct Direct {
  friend constexpr bool operator==(const Direct&, const Direct&) = default;
};

/// Block plus face halos staged into a private scratch box, computed from scratch.
struct Tiled3D {
  Extent3 block{8, 8, 8};
  friend constexpr bool operator==(const Tiled3D&, const Tiled3D&) = default;
};

/// 2.5D streaming along Z over PX x PY columns. One active XY plane in scratch; the
/// 2R+1 Z-neighbours of every lane sit in fixed slots, one slot refreshed per Z step.
struct StreamFixed {
  Extent2 plane{16, 16};
  friend constexpr bool operator==(const StreamFixed&, const StreamFixed&) = default;
};

/// 2.5D streaming with the Z part split into a forward phase (offsets -R..0, partial
/// results stored) and a backward phase (offsets +1..+R, final value written).
struct SemiStencil {
  Extent2 plane{16, 16};
  friend constexpr bool operator==(const SemiStencil&, const SemiStencil&) = default;
};

using KernelVariant = std::variant<Direct, Tiled3D, StreamFixed, SemiStencil>;

[[nodiscard]] std::string label(const KernelVariant& variant);

/// Accepts direct, tiled3d, stream-fixed, semi.
[[nodiscard]] KernelVariant parse_variant(std::string_view name, Extent3 block = {8, 8, 8},
                                          Extent2 plane = {16, 16});

/// Tiling mode a variant runs on; Direct accepts either.
[[nodiscard]] std::optional<TileMode> required_mode(const KernelVariant& variant) noexcept;

/// Floating-point operations per updated point.
[[nodiscard]] std::uint64_t kernel_flops_per_point(const KernelVariant& variant,
                                                   index_t radius) noexcept;

/// Private scratch points a single invocation holds (0 for Direct).
[[nodiscard]] std::uint64_t scratch_points(const KernelVariant& variant, index_t radius) noexcept;

struct KernelOptions {
  /// Scratch budget per invocation, mimicking an on-chip shared-memory limit.
  std::size_t scratch_cap_bytes = 228 * 1024;
};

/// Software-modelled movement, in bytes, for one kernel run.
struct KernelCounters {
  std::uint64_t points_updated = 0;
  std::uint64_t scratch_bytes_peak = 0;
  std::uint64_t ideal_reads = 0;
  std::uint64_t ideal_writes = 0;
  std::uint64_t flops = 0;

  /// Sums traffic, keeps the larger scratch peak.
  KernelCounters& operator+=(const KernelCounters& other) noexcept;
  friend bool operator==(const KernelCounters&, const KernelCounters&) = default;
};

/// Rejects mismatched plan/variant pairs, oversized planes and scratch over budget.
void validate_kernel_config(const KernelVariant& variant, const TilePlan& plan, index_t radius,
                            std::size_t element_size, const KernelOptions& options = {});

/// Computes the Laplacian of `u` into `out` on every tile of `plan`.
template <class T>
KernelCounters run_kernel(const KernelVariant& variant, const BasicGrid<T>& u,
                          const StencilCoeffs& c, const TilePlan& plan, BasicGrid<T>& out,
                          const KernelOptions& options = {});

/// Single-tile form of run_kernel; used by the schedulers. Does not validate the plan.
template <class T>
KernelCounters run_kernel_tile(const KernelVariant& variant, const BasicGrid<T>& u,
                               const StencilCoeffs& c, const Tile& tile, BasicGrid<T>& out);

/// Partial sums of the semi-stencil right after each output's forward phase, for a single
/// column tile, X fastest then Y then Z.
template <class T>
std::vector<T> semi_forward_partials(const BasicGrid<T>& u, const StencilCoeffs& c,
                                     const Tile& column);

}  // namespace wavebench
