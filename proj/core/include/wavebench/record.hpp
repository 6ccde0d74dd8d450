#pragma once

#include <cstdint>
#include <string>

#include "wavebench/grid.hpp"
#include "wavebench/kernels.hpp"

namespace wavebench {

/// Interior points updated per wall second: nx*ny*nz*steps / seconds.
[[nodiscard]] double grid_points_per_second(Extent3 interior, std::int64_t steps,
                                            double seconds);

/// One benchmark measurement, exactly the columns persisted to CSV.
struct BenchRecord {
  std::string variant;
  std::string schedule;
  index_t nx = 0;
  index_t ny = 0;
  index_t nz = 0;
  std::int64_t steps = 0;
  std::int64_t reps = 1;
  double seconds_median = 0.0;
  double grid_per_s = 0.0;
  std::uint64_t flops = 0;
  std::uint64_t ideal_reads_bytes = 0;
  std::uint64_t ideal_writes_bytes = 0;
  std::uint64_t scratch_peak_bytes = 0;
  std::string status = "ok";

  [[nodiscard]] Extent3 interior() const noexcept { return {nx, ny, nz}; }
  void set_counters(const KernelCounters& c) noexcept;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

}  // namespace wavebench
