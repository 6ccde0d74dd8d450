#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wavebench/grid.hpp"
#include "wavebench/kernels.hpp"
#include "wavebench/record.hpp"
#include "wavebench/stencil.hpp"
#include "wavebench/task_pool.hpp"

namespace wavebench {

// ---------------------------------------------------------------------------
// Schedules

/// Every task in plan order on the calling thread.
struct Serial {
  friend constexpr bool operator==(const Serial&, const Serial&) = default;
};

/// Inner tiles on one lane, boundary shells on a second lane, overlapping within a step.
struct CoarseAsync {
  friend constexpr bool operator==(const CoarseAsync&, const CoarseAsync&) = default;
};

/// Inner slabs dealt round-robin over `lanes` lanes so adjacent slabs never share a lane;
/// boundary shells on one extra lane.
struct FineAsync {
  int lanes = 2;
  friend constexpr bool operator==(const FineAsync&, const FineAsync&) = default;
};

using Schedule = std::variant<Serial, CoarseAsync, FineAsync>;

/// "serial", "coarse", "fine:<lanes>".
[[nodiscard]] std::string label(const Schedule& schedule);
/// Accepts serial, coarse, fine and fine:<lanes>; `lanes` applies to a bare "fine".
[[nodiscard]] Schedule parse_schedule(std::string_view name, int lanes = 2);

struct ScheduledTask {
  std::size_t tile = 0;
  int lane = 0;
  friend constexpr bool operator==(const ScheduledTask&, const ScheduledTask&) = default;
};

[[nodiscard]] std::vector<ScheduledTask> schedule_serial(const TilePlan& plan);
[[nodiscard]] std::vector<ScheduledTask> schedule_coarse(const TilePlan& plan);
[[nodiscard]] std::vector<ScheduledTask> schedule_fine(const TilePlan& plan, int lanes = 2);
[[nodiscard]] std::vector<ScheduledTask> make_schedule(const Schedule& schedule,
                                                       const TilePlan& plan);
/// Worker lanes the schedule needs; 0 for Serial (no worker threads).
[[nodiscard]] int worker_lanes(const Schedule& schedule) noexcept;

// ---------------------------------------------------------------------------
// Trace log: one line per task, "step,tile,lane,start_ns,end_ns".

struct TraceEvent {
  std::int64_t step = 0;
  std::size_t tile = 0;
  int lane = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Thread-safe collector of task intervals on the steady clock.
class TraceLog {
 public:
  TraceLog();

  [[nodiscard]] std::int64_t now_ns() const noexcept;
  void record(const TraceEvent& event);
  [[nodiscard]] std::vector<TraceEvent> events() const;
  void clear();

  void write(const std::filesystem::path& path) const;

 private:
  std::chrono::steady_clock::time_point origin_;
  mutable std::mutex mutex_;
  std::vector<TraceEvent> events_;
};

[[nodiscard]] std::vector<TraceEvent> read_trace(const std::filesystem::path& path);

struct TraceConflict {
  TraceEvent a;
  TraceEvent b;
};

/// Pairs of tasks of the same step whose time intervals overlap and whose tiles intersect.
[[nodiscard]] std::vector<TraceConflict> find_write_conflicts(
    const std::vector<TraceEvent>& events, const TilePlan& plan);

/// Number of same-step task pairs whose intervals overlap in time.
[[nodiscard]] std::size_t count_concurrent_pairs(const std::vector<TraceEvent>& events);

// ---------------------------------------------------------------------------
// Physics configuration

enum class SourceKind { Ricker, Impulse };

struct Source {
  Index3 position{};
  double peak_frequency = 10.0;  // Hz
  double amplitude = 1.0;
  SourceKind kind = SourceKind::Ricker;
};

/// A (1 - 2 pi^2 f^2 (t - t0)^2) exp(-pi^2 f^2 (t - t0)^2), t0 = 1.5 / f.
[[nodiscard]] double ricker(double t, double peak_frequency, double amplitude) noexcept;

/// Source value injected at step n (time n*dt).
[[nodiscard]] double source_value(const Source& source, std::int64_t step, double dt) noexcept;

struct PropagatorConfig {
  Extent3 interior{48, 48, 48};
  Spacing spacing{10.0, 10.0, 10.0};
  index_t radius = 4;
  double dt = 0.0;  // seconds; 0 means 0.9 of the stability limit
  std::int64_t nsteps = 0;
  double velocity = 1500.0;  // length/s, used when velocity_field is empty
  /// Optional per-cell velocity over the interior, X fastest.
  std::vector<double> velocity_field;
  Source source{};
  index_t sponge_width = 0;
  double sponge_strength = 0.0;
  Schedule schedule = Serial{};
  /// Inner-region tile size; Planes25D plans use x and y only.
  Extent3 tile_block{16, 16, 16};
  KernelOptions kernel_options{};
  /// Uniform(-noise, noise) initial field for u_prev and u_curr, drawn from `seed`.
  double initial_noise = 0.0;
  std::uint64_t seed = 0;
};

/// 2 / (v_max sqrt(sum_a S_a)), S_a = |c_a[0]| + 2 sum_m |c_a[m]|.
[[nodiscard]] double cfl_limit(double v_max, const StencilCoeffs& coeffs);
[[nodiscard]] double max_velocity(const PropagatorConfig& cfg);

/// Fills in a default dt and rejects configurations that cannot run.
[[nodiscard]] PropagatorConfig resolve_config(PropagatorConfig cfg);

/// exp(-strength (w - d)^2 / w^2) for a point d layers in from the outer face, 1 for d >= w.
[[nodiscard]] double sponge_factor(index_t d, index_t width, double strength) noexcept;

/// Layers between an interior point and the nearest domain face (0 = outermost).
[[nodiscard]] index_t distance_to_face(Extent3 interior, index_t i, index_t j,
                                       index_t k) noexcept;

template <class T>
void apply_sponge(BasicGrid<T>& grid, index_t width, double strength);

// ---------------------------------------------------------------------------
// Time stepping

/// Leapfrog triple. Buffers are swapped, never copied, between steps.
template <class T>
struct WaveState {
  BasicGrid<T> prev;
  BasicGrid<T> curr;
  BasicGrid<T> next;
  std::int64_t step = 0;
};

template <class T>
[[nodiscard]] WaveState<T> make_state(const PropagatorConfig& cfg);

/// Owns the decomposition, task schedule and worker lanes for one configuration.
template <class T>
class Propagator {
 public:
  Propagator(PropagatorConfig cfg, KernelVariant variant, TraceLog* trace = nullptr);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  /// u_next = 2 u_curr - u_prev + dt^2 v^2 (L u_curr + s), sponge, then rotate.
  void step(WaveState<T>& state);

  [[nodiscard]] const PropagatorConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const TilePlan& plan() const noexcept { return plan_; }
  [[nodiscard]] const StencilCoeffs& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] const std::vector<ScheduledTask>& tasks() const noexcept { return tasks_; }
  [[nodiscard]] const KernelCounters& counters() const noexcept { return counters_; }

 private:
  struct TileResult {
    KernelCounters counters;
    bool finite = true;
  };

  TileResult run_tile(WaveState<T>& state, std::size_t tile_index);

  PropagatorConfig cfg_;
  KernelVariant variant_;
  StencilCoeffs coeffs_;
  TilePlan plan_;
  std::vector<ScheduledTask> tasks_;
  std::unique_ptr<TaskPool> pool_;
  TraceLog* trace_;
  std::vector<T> scale_field_;  // dt^2 v^2 per interior cell when velocity varies
  T scale_ = T{};
  KernelCounters counters_{};
};

template <class T>
struct PropagationResult {
  WaveState<T> state;
  BenchRecord record;
};

/// Runs cfg.nsteps steps from make_state(cfg) and times them.
template <class T>
[[nodiscard]] PropagationResult<T> propagate(const PropagatorConfig& cfg,
                                             const KernelVariant& variant,
                                             TraceLog* trace = nullptr);

}  // namespace wavebench
