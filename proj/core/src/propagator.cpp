#include "wavebench/propagator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace wavebench {

// ---------------------------------------------------------------------------
// Schedules

std::string label(const Schedule& schedule) {
  if (std::holds_alternative<Serial>(schedule)) return "serial";
  if (std::holds_alternative<CoarseAsync>(schedule)) return "coarse";
  return "fine:" + std::to_string(std::get<FineAsync>(schedule).lanes);
}

Schedule parse_schedule(std::string_view name, int lanes) {
  if (name == "serial") return Serial{};
  if (name == "coarse") return CoarseAsync{};
  if (name.starts_with("fine")) {
    if (name.size() > 5 && name[4] == ':') {
      const std::string_view digits = name.substr(5);
      int parsed = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), parsed);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ConfigurationError("bad lane count in schedule '" + std::string(name) + "'");
      }
      lanes = parsed;
    } else if (name.size() != 4) {
      throw ConfigurationError("unknown schedule '" + std::string(name) + "'");
    }
    if (lanes < 1) {
      throw ConfigurationError("fine schedule needs lanes >= 1");
    }
    return FineAsync{lanes};
  }
  throw ConfigurationError("unknown schedule '" + std::string(name) + "'");
}

std::vector<ScheduledTask> schedule_serial(const TilePlan& plan) {
  std::vector<ScheduledTask> tasks;
  for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
    tasks.push_back({t, 0});
  }
  return tasks;
}

std::vector<ScheduledTask> schedule_coarse(const TilePlan& plan) {
  std::vector<ScheduledTask> tasks;
  for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
    tasks.push_back({t, is_boundary(plan.tiles[t].region) ? 1 : 0});
  }
  return tasks;
}

std::vector<ScheduledTask> schedule_fine(const TilePlan& plan, int lanes) {
  if (lanes < 1) {
    throw ConfigurationError("fine schedule needs lanes >= 1");
  }
  std::vector<ScheduledTask> tasks;
  int next_lane = 0;
  for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
    if (is_boundary(plan.tiles[t].region)) {
      tasks.push_back({t, lanes});
    } else {
      tasks.push_back({t, next_lane});
      next_lane = (next_lane + 1) % lanes;
    }
  }
  return tasks;
}

std::vector<ScheduledTask> make_schedule(const Schedule& schedule, const TilePlan& plan) {
  if (std::holds_alternative<Serial>(schedule)) return schedule_serial(plan);
  if (std::holds_alternative<CoarseAsync>(schedule)) return schedule_coarse(plan);
  return schedule_fine(plan, std::get<FineAsync>(schedule).lanes);
}

int worker_lanes(const Schedule& schedule) noexcept {
  if (std::holds_alternative<Serial>(schedule)) return 0;
  if (std::holds_alternative<CoarseAsync>(schedule)) return 2;
  return std::get<FineAsync>(schedule).lanes + 1;
}

// ---------------------------------------------------------------------------
// Trace

TraceLog::TraceLog() : origin_(std::chrono::steady_clock::now()) {}

std::int64_t TraceLog::now_ns() const noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                              origin_)
      .count();
}

void TraceLog::record(const TraceEvent& event) {
  std::lock_guard lock(mutex_);
  events_.push_back(event);
}

std::vector<TraceEvent> TraceLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

void TraceLog::clear() {
  std::lock_guard lock(mutex_);
  events_.clear();
}

void TraceLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ConfigurationError("cannot write trace to " + path.string());
  }
  for (const TraceEvent& e : events()) {
    out << e.step << ',' << e.tile << ',' << e.lane << ',' << e.start_ns << ',' << e.end_ns
        << '\n';
  }
}

std::vector<TraceEvent> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError("cannot read trace " + path.string());
  }
  std::vector<TraceEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    TraceEvent e;
    char c1 = 0;
    char c2 = 0;
    char c3 = 0;
    char c4 = 0;
    if (!(ss >> e.step >> c1 >> e.tile >> c2 >> e.lane >> c3 >> e.start_ns >> c4 >> e.end_ns) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw ConfigurationError("malformed trace line: " + line);
    }
    events.push_back(e);
  }
  return events;
}

namespace {

bool intervals_overlap(const TraceEvent& a, const TraceEvent& b) {
  return a.start_ns < b.end_ns && b.start_ns < a.end_ns;
}

template <class Fn>
void for_each_same_step_pair(const std::vector<TraceEvent>& events, Fn&& fn) {
  std::vector<TraceEvent> sorted = events;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.step < b.step; });
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin;
    while (end < sorted.size() && sorted[end].step == sorted[begin].step) {
      ++end;
    }
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = a + 1; b < end; ++b) {
        fn(sorted[a], sorted[b]);
      }
    }
    begin = end;
  }
}

}  // namespace

std::vector<TraceConflict> find_write_conflicts(const std::vector<TraceEvent>& events,
                                                const TilePlan& plan) {
  std::vector<TraceConflict> conflicts;
  for_each_same_step_pair(events, [&](const TraceEvent& a, const TraceEvent& b) {
    if (a.tile >= plan.tiles.size() || b.tile >= plan.tiles.size()) {
      throw ConfigurationError("trace references a tile outside the plan");
    }
    if (intervals_overlap(a, b) && tiles_overlap(plan.tiles[a.tile], plan.tiles[b.tile])) {
      conflicts.push_back({a, b});
    }
  });
  return conflicts;
}

std::size_t count_concurrent_pairs(const std::vector<TraceEvent>& events) {
  std::size_t n = 0;
  for_each_same_step_pair(events, [&](const TraceEvent& a, const TraceEvent& b) {
    n += intervals_overlap(a, b) ? 1 : 0;
  });
  return n;
}

// ---------------------------------------------------------------------------
// Physics

double ricker(double t, double peak_frequency, double amplitude) noexcept {
  const double t0 = 1.5 / peak_frequency;
  const double a = std::numbers::pi * std::numbers::pi * peak_frequency * peak_frequency *
                   (t - t0) * (t - t0);
  return amplitude * (1.0 - 2.0 * a) * std::exp(-a);
}

double source_value(const Source& source, std::int64_t step, double dt) noexcept {
  if (source.kind == SourceKind::Impulse) {
    return step == 0 ? source.amplitude : 0.0;
  }
  return ricker(static_cast<double>(step) * dt, source.peak_frequency, source.amplitude);
}

double cfl_limit(double v_max, const StencilCoeffs& coeffs) {
  if (!std::isfinite(v_max) || v_max <= 0.0) {
    throw ConfigurationError("maximum velocity must be finite and > 0");
  }
  double bound = 0.0;
  for (const auto& w : coeffs.axis) {
    double s = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
      s += (m == 0 ? 1.0 : 2.0) * std::abs(w[m]);
    }
    bound += s;
  }
  if (bound <= 0.0) {
    throw ConfigurationError("stencil has no spatial coupling");
  }
  return 2.0 / (v_max * std::sqrt(bound));
}

double max_velocity(const PropagatorConfig& cfg) {
  if (cfg.velocity_field.empty()) {
    return cfg.velocity;
  }
  return *std::max_element(cfg.velocity_field.begin(), cfg.velocity_field.end());
}

PropagatorConfig resolve_config(PropagatorConfig cfg) {
  const Extent3 n = cfg.interior;
  if (n.x < 1 || n.y < 1 || n.z < 1) {
    throw DimensionError("interior extents must be >= 1");
  }
  if (cfg.nsteps < 0) {
    throw ConfigurationError("step count must be >= 0");
  }
  if (!cfg.velocity_field.empty()) {
    if (static_cast<index_t>(cfg.velocity_field.size()) != n.volume()) {
      throw ConfigurationError("velocity field size does not match the interior");
    }
    for (const double v : cfg.velocity_field) {
      if (!std::isfinite(v) || v <= 0.0) {
        throw ConfigurationError("velocity field must be finite and > 0 everywhere");
      }
    }
  } else if (!std::isfinite(cfg.velocity) || cfg.velocity <= 0.0) {
    throw ConfigurationError("velocity must be finite and > 0");
  }
  const Index3 s = cfg.source.position;
  if (s.i < 0 || s.i >= n.x || s.j < 0 || s.j >= n.y || s.k < 0 || s.k >= n.z) {
    throw ConfigurationError("source position lies outside the interior");
  }
  if (!(cfg.source.peak_frequency > 0.0) || !std::isfinite(cfg.source.amplitude)) {
    throw ConfigurationError("source needs a positive peak frequency and finite amplitude");
  }
  if (cfg.sponge_width < 0 || !(cfg.sponge_strength >= 0.0)) {
    throw ConfigurationError("sponge width and strength must be >= 0");
  }
  if (const auto* f = std::get_if<FineAsync>(&cfg.schedule); f != nullptr && f->lanes < 1) {
    throw ConfigurationError("fine schedule needs lanes >= 1");
  }
  const StencilCoeffs coeffs = derive_coefficients(cfg.radius, cfg.spacing);
  const double limit = cfl_limit(max_velocity(cfg), coeffs);
  if (cfg.dt == 0.0) {
    cfg.dt = 0.9 * limit;
  }
  if (!std::isfinite(cfg.dt) || cfg.dt < 0.0) {
    throw ConfigurationError("time step must be finite and > 0");
  }
  if (cfg.dt > limit) {
    throw ConfigurationError("time step " + std::to_string(cfg.dt) +
                             " violates the stability limit " + std::to_string(limit));
  }
  return cfg;
}

double sponge_factor(index_t d, index_t width, double strength) noexcept {
  if (width <= 0 || d >= width) {
    return 1.0;
  }
  const double gap = static_cast<double>(width - d);
  return std::exp(-strength * gap * gap / static_cast<double>(width * width));
}

index_t distance_to_face(Extent3 n, index_t i, index_t j, index_t k) noexcept {
  return std::min({i, n.x - 1 - i, j, n.y - 1 - j, k, n.z - 1 - k});
}

template <class T>
void apply_sponge(BasicGrid<T>& grid, index_t width, double strength) {
  if (width <= 0 || strength == 0.0) {
    return;
  }
  const Extent3 n = grid.interior();
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        const index_t d = distance_to_face(n, i, j, k);
        if (d < width) {
          grid(i, j, k) *= static_cast<T>(sponge_factor(d, width, strength));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Propagator

template <class T>
WaveState<T> make_state(const PropagatorConfig& cfg) {
  WaveState<T> state{
      BasicGrid<T>(cfg.interior, cfg.radius, cfg.spacing),
      BasicGrid<T>(cfg.interior, cfg.radius, cfg.spacing),
      BasicGrid<T>(cfg.interior, cfg.radius, cfg.spacing),
      0,
  };
  if (cfg.initial_noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-cfg.initial_noise, cfg.initial_noise);
    for (index_t k = 0; k < cfg.interior.z; ++k) {
      for (index_t j = 0; j < cfg.interior.y; ++j) {
        for (index_t i = 0; i < cfg.interior.x; ++i) {
          const T v = static_cast<T>(dist(rng));
          state.prev(i, j, k) = v;
          state.curr(i, j, k) = v;
        }
      }
    }
  }
  return state;
}

template <class T>
Propagator<T>::Propagator(PropagatorConfig cfg, KernelVariant variant, TraceLog* trace)
    : cfg_(resolve_config(std::move(cfg))),
      variant_(std::move(variant)),
      coeffs_(derive_coefficients(cfg_.radius, cfg_.spacing)),
      trace_(trace) {
  const TileMode mode = required_mode(variant_).value_or(TileMode::Blocks3D);
  plan_ = decompose(cfg_.interior, mode, cfg_.tile_block, cfg_.sponge_width);
  validate_kernel_config(variant_, plan_, cfg_.radius, sizeof(T), cfg_.kernel_options);
  tasks_ = make_schedule(cfg_.schedule, plan_);
  if (const int lanes = worker_lanes(cfg_.schedule); lanes > 0) {
    pool_ = std::make_unique<TaskPool>(lanes);
  }
  const double dt2 = cfg_.dt * cfg_.dt;
  if (cfg_.velocity_field.empty()) {
    scale_ = static_cast<T>(dt2 * cfg_.velocity * cfg_.velocity);
  } else {
    scale_field_.reserve(cfg_.velocity_field.size());
    for (const double v : cfg_.velocity_field) {
      scale_field_.push_back(static_cast<T>(dt2 * v * v));
    }
  }
}

template <class T>
Propagator<T>::~Propagator() = default;

template <class T>
typename Propagator<T>::TileResult Propagator<T>::run_tile(WaveState<T>& state,
                                                           std::size_t tile_index) {
  const Tile& tile = plan_.tiles[tile_index];
  TileResult result;
  result.counters = run_kernel_tile(variant_, state.curr, coeffs_, tile, state.next);

  // next holds L(u_curr) on this tile now; the source joins the Laplacian before scaling.
  const Index3 src = cfg_.source.position;
  if (tile.contains(src)) {
    state.next(src.i, src.j, src.k) +=
        static_cast<T>(source_value(cfg_.source, state.step, cfg_.dt));
  }

  const index_t w = cfg_.sponge_width;
  const bool sponge = is_boundary(tile.region) && w > 0 && cfg_.sponge_strength != 0.0;
  std::vector<T> taper;
  if (sponge) {
    for (index_t d = 0; d < w; ++d) {
      taper.push_back(static_cast<T>(sponge_factor(d, w, cfg_.sponge_strength)));
    }
  }

  const Extent3 n = cfg_.interior;
  const bool varying = !scale_field_.empty();
  bool finite = true;
  for (index_t k = tile.origin.k; k < tile.origin.k + tile.dims.z; ++k) {
    for (index_t j = tile.origin.j; j < tile.origin.j + tile.dims.y; ++j) {
      T* nx = &state.next(tile.origin.i, j, k);
      const T* cu = &state.curr(tile.origin.i, j, k);
      const T* pv = &state.prev(tile.origin.i, j, k);
      const T* sc = varying ? scale_field_.data() + (k * n.y + j) * n.x + tile.origin.i : nullptr;
      for (index_t x = 0; x < tile.dims.x; ++x) {
        const T s = varying ? sc[x] : scale_;
        T v = T(2) * cu[x] - pv[x] + s * nx[x];
        if (sponge) {
          const index_t d = distance_to_face(n, tile.origin.i + x, j, k);
          if (d < w) {
            v *= taper[static_cast<std::size_t>(d)];
          }
        }
        nx[x] = v;
        finite = finite && std::isfinite(v);
      }
    }
  }
  result.finite = finite;
  return result;
}

template <class T>
void Propagator<T>::step(WaveState<T>& state) {
  if (!state.curr.same_shape(state.next) || !state.prev.same_shape(state.next) ||
      state.curr.interior() != cfg_.interior || state.curr.halo() < cfg_.radius) {
    throw DimensionError("wave state does not match the propagator configuration");
  }
  std::vector<TileResult> results(plan_.tiles.size());
  const auto timed = [&](const ScheduledTask& task) {
    const std::int64_t start = trace_ != nullptr ? trace_->now_ns() : 0;
    results[task.tile] = run_tile(state, task.tile);
    if (trace_ != nullptr) {
      trace_->record({state.step, task.tile, task.lane, start, trace_->now_ns()});
    }
  };

  if (!pool_) {
    for (const ScheduledTask& task : tasks_) {
      timed(task);
    }
  } else {
    for (const ScheduledTask& task : tasks_) {
      pool_->submit(task.lane, [&timed, task] { timed(task); });
    }
    pool_->wait();
  }

  bool finite = true;
  for (const TileResult& r : results) {
    counters_ += r.counters;
    finite = finite && r.finite;
  }
  if (!finite) {
    throw NumericalBlowupError(state.step);
  }
  std::swap(state.prev, state.curr);
  std::swap(state.curr, state.next);
  ++state.step;
}

template <class T>
PropagationResult<T> propagate(const PropagatorConfig& cfg, const KernelVariant& variant,
                               TraceLog* trace) {
  Propagator<T> propagator(cfg, variant, trace);
  PropagationResult<T> result{make_state<T>(propagator.config()), {}};

  const auto start = std::chrono::steady_clock::now();
  for (std::int64_t n = 0; n < propagator.config().nsteps; ++n) {
    propagator.step(result.state);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  BenchRecord& r = result.record;
  r.variant = label(variant);
  r.schedule = label(propagator.config().schedule);
  r.nx = cfg.interior.x;
  r.ny = cfg.interior.y;
  r.nz = cfg.interior.z;
  r.steps = propagator.config().nsteps;
  r.reps = 1;
  r.seconds_median = seconds;
  r.grid_per_s = grid_points_per_second(cfg.interior, r.steps, seconds);
  r.set_counters(propagator.counters());
  return result;
}

#define WAVEBENCH_INSTANTIATE(T)                                                            \
  template void apply_sponge<T>(BasicGrid<T>&, index_t, double);                           \
  template WaveState<T> make_state<T>(const PropagatorConfig&);                            \
  template class Propagator<T>;                                                             \
  template PropagationResult<T> propagate<T>(const PropagatorConfig&, const KernelVariant&, \
                                             TraceLog*);

WAVEBENCH_INSTANTIATE(float)
WAVEBENCH_INSTANTIATE(double)

#undef WAVEBENCH_INSTANTIATE

}  // namespace wavebench
