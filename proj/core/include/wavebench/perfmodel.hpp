#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wavebench/grid.hpp"
#include "wavebench/kernels.hpp"

namespace wavebench {

/// Extra bandwidth ceiling (e.g. an L2 roof) drawn alongside the DRAM one.
struct Ceiling {
  std::string name;
  double bandwidth_gbs = 0.0;
  friend bool operator==(const Ceiling&, const Ceiling&) = default;
};

struct MachineSpec {
  std::string name;
  double peak_gflops = 0.0;
  double mem_bw_gbs = 0.0;
  std::vector<Ceiling> cache_ceilings;
  friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

/// Parses `key=value` lines. Required keys: name, peak_gflops, mem_bw_gbs. Any other
/// `<level>_bw_gbs` key adds a cache ceiling. `#` starts a comment.
[[nodiscard]] MachineSpec parse_machine_spec(std::string_view text);
[[nodiscard]] MachineSpec load_machine_spec(const std::filesystem::path& path);

struct RooflinePoint {
  std::string label;
  double arithmetic_intensity = 0.0;  // FLOP/byte
  double performance = 0.0;           // GFLOP/s
  friend bool operator==(const RooflinePoint&, const RooflinePoint&) = default;
};

struct TileFootprint {
  std::uint64_t block_points = 0;
  std::uint64_t halo_points = 0;
  std::uint64_t total = 0;
  friend bool operator==(const TileFootprint&, const TileFootprint&) = default;
};

/// Points loaded for a D block: the block itself plus (DxDy + DxDz + DyDz) * R * 2 halo.
[[nodiscard]] TileFootprint tile_footprint(Extent3 block, index_t radius);

/// Points of one active XY plane with its halo ring storage: (Px + 2R)(Py + 2R).
[[nodiscard]] std::uint64_t plane_footprint(Extent2 plane, index_t radius);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// One active plane against 2R+1 resident planes, reduced.
[[nodiscard]] Fraction plane_ratio(Extent2 plane, index_t radius);

/// flops / bytes; throws UndefinedIntensityError when bytes is zero.
[[nodiscard]] double arithmetic_intensity(double flops, double bytes_moved);

/// min(peak, ai * bandwidth) in GFLOP/s.
[[nodiscard]] double roofline_attainable(const MachineSpec& spec, double ai);
[[nodiscard]] double roofline_attainable(double peak_gflops, double bandwidth_gbs, double ai);

/// Intensity where the bandwidth slope meets the compute plateau.
[[nodiscard]] double ridge_point(const MachineSpec& spec);

struct Traffic {
  std::uint64_t ideal_reads = 0;
  std::uint64_t ideal_writes = 0;
  friend bool operator==(const Traffic&, const Traffic&) = default;
};

/// Closed-form ideal traffic, in bytes, of one run_kernel call over `plan`.
///
/// Per updated point V and element size e:
///   Direct       reads V(6R+1)e, writes Ve
///   Tiled3D      reads sum over sub-blocks of tile_footprint(total) e, writes Ve
///   StreamFixed  reads per column ((dz+2R)PxPy + 2R dz(Px+Py)) e, writes Ve
///   SemiStencil  as StreamFixed plus one partial reload per point, writes 2Ve
[[nodiscard]] Traffic traffic_model(const KernelVariant& variant, index_t radius,
                                    const TilePlan& plan, std::size_t element_size);

}  // namespace wavebench
