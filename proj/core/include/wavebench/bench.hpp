#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wavebench/kernels.hpp"
#include "wavebench/propagator.hpp"
#include "wavebench/record.hpp"

namespace wavebench {

enum class Precision { F32, F64 };

[[nodiscard]] std::string_view to_string(Precision p) noexcept;
[[nodiscard]] Precision parse_precision(std::string_view name);

/// Inner tile size matching one kernel launch: the Tiled3D block, or the streaming plane
/// (z left to the decomposition). Direct uses `fallback`.
[[nodiscard]] Extent3 natural_tile_block(const KernelVariant& variant,
                                         Extent3 fallback = {16, 16, 16});

struct BenchConfig {
  PropagatorConfig propagator{};
  KernelVariant variant = Direct{};
  Precision precision = Precision::F64;
  int reps = 1;
  int warmup = 1;
  /// Written from the first timed repetition when non-empty.
  std::filesystem::path trace_path;
};

struct BenchResult {
  BenchRecord record;
  std::vector<double> rep_seconds;
  std::vector<std::string> warnings;
};

[[nodiscard]] double median(std::vector<double> values);

/// Warmup runs, then `reps` timed runs; the record carries the median time.
[[nodiscard]] BenchResult run_benchmark(const BenchConfig& cfg);

struct SweepConfig {
  std::vector<index_t> sizes;  // cubic n^3, strictly increasing
  std::vector<KernelVariant> variants{Direct{}};
  std::vector<Schedule> schedules{Serial{}, FineAsync{2}};
  std::int64_t steps = 10;
  int reps = 1;
  int warmup = 1;
  Precision precision = Precision::F64;
  /// Template for every cell; interior, schedule, tile block and source are overridden.
  PropagatorConfig base{};
};

/// One row per (size, variant, schedule); a failing cell yields a "failed" row.
[[nodiscard]] std::vector<BenchRecord> sweep(const SweepConfig& cfg,
                                             std::ostream* log = nullptr);

/// Perturbs one coefficient of the named variant's run, for exercising breach reporting.
struct CoefficientFault {
  std::string variant;
  int axis = 0;
  index_t offset = 1;
  double relative_delta = 1e-3;
};

struct VerifyConfig {
  Extent3 interior{32, 32, 32};
  index_t radius = 4;
  std::vector<KernelVariant> variants;
  std::vector<Schedule> schedules;
  std::int64_t schedule_steps = 10;
  std::uint64_t seed = 1;
  Precision precision = Precision::F64;
  /// Max abs diff for f64; relative to max |reference| for f32.
  double tolerance_f64 = 1e-12;
  double tolerance_f32 = 1e-5;
  index_t boundary_width = 4;
  std::optional<CoefficientFault> fault;
};

struct VerifyEntry {
  std::string name;
  std::string kind;  // "kernel" or "schedule"
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  [[nodiscard]] bool passed() const noexcept;
};

/// Kernels against laplacian_direct on a random field; schedules against Serial.
[[nodiscard]] VerifyReport verify(const VerifyConfig& cfg);

}  // namespace wavebench
