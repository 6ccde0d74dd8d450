#include "wavebench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace wavebench {

double grid_points_per_second(Extent3 interior, std::int64_t steps, double seconds) {
  if (steps <= 0 || !(seconds > 0.0)) {
    return 0.0;
  }
  return static_cast<double>(interior.volume()) * static_cast<double>(steps) / seconds;
}

void BenchRecord::set_counters(const KernelCounters& c) noexcept {
  flops = c.flops;
  ideal_reads_bytes = c.ideal_reads;
  ideal_writes_bytes = c.ideal_writes;
  scratch_peak_bytes = c.scratch_bytes_peak;
}

std::string_view to_string(Precision p) noexcept { return p == Precision::F32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view name) {
  if (name == "f32") return Precision::F32;
  if (name == "f64") return Precision::F64;
  throw ConfigurationError("unknown precision '" + std::string(name) + "'");
}

Extent3 natural_tile_block(const KernelVariant& variant, Extent3 fallback) {
  if (const auto* t = std::get_if<Tiled3D>(&variant)) return t->block;
  if (const auto* s = std::get_if<StreamFixed>(&variant)) return {s->plane.x, s->plane.y, 1};
  if (const auto* s = std::get_if<SemiStencil>(&variant)) return {s->plane.x, s->plane.y, 1};
  return fallback;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw ConfigurationError("median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

template <class T>
BenchResult run_benchmark_as(const BenchConfig& cfg) {
  BenchResult result;
  for (int w = 0; w < cfg.warmup; ++w) {
    (void)propagate<T>(cfg.propagator, cfg.variant);
  }
  BenchRecord last;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    TraceLog trace;
    const bool traced = rep == 0 && !cfg.trace_path.empty();
    auto run = propagate<T>(cfg.propagator, cfg.variant, traced ? &trace : nullptr);
    if (traced) {
      trace.write(cfg.trace_path);
    }
    result.rep_seconds.push_back(run.record.seconds_median);
    last = std::move(run.record);
  }
  result.record = std::move(last);
  result.record.reps = cfg.reps;
  result.record.seconds_median = median(result.rep_seconds);
  result.record.grid_per_s = grid_points_per_second(
      result.record.interior(), result.record.steps, result.record.seconds_median);
  return result;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
  if (cfg.propagator.nsteps <= 0) {
    throw ConfigurationError("benchmark needs at least one time step");
  }
  if (cfg.reps < 1 || cfg.warmup < 0) {
    throw ConfigurationError("benchmark needs reps >= 1 and warmup >= 0");
  }
  BenchResult result = cfg.precision == Precision::F32 ? run_benchmark_as<float>(cfg)
                                                       : run_benchmark_as<double>(cfg);
  constexpr double kMinSeconds = 0.010;
  if (result.record.seconds_median < kMinSeconds) {
    const double scale = 2.0 * kMinSeconds / std::max(result.record.seconds_median, 1e-9);
    const auto suggested =
        static_cast<std::int64_t>(std::ceil(static_cast<double>(result.record.steps) * scale));
    result.warnings.push_back(fmt::format(
        "run took {:.3g} s, below the 10 ms timer floor; try --steps {}",
        result.record.seconds_median, suggested));
  }
  return result;
}

std::vector<BenchRecord> sweep(const SweepConfig& cfg, std::ostream* log) {
  if (cfg.sizes.empty()) {
    throw ConfigurationError("sweep needs at least one grid size");
  }
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] < 1 || (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])) {
      throw ConfigurationError("sweep sizes must be positive and strictly increasing");
    }
  }
  if (cfg.reps < 1) {
    throw ConfigurationError("sweep needs reps >= 1");
  }

  std::vector<BenchRecord> rows;
  for (const index_t n : cfg.sizes) {
    for (const KernelVariant& variant : cfg.variants) {
      for (const Schedule& schedule : cfg.schedules) {
        BenchConfig bc;
        bc.propagator = cfg.base;
        bc.propagator.interior = {n, n, n};
        bc.propagator.nsteps = cfg.steps;
        bc.propagator.schedule = schedule;
        bc.propagator.tile_block = natural_tile_block(variant, cfg.base.tile_block);
        bc.propagator.source.position = {n / 2, n / 2, n / 2};
        bc.variant = variant;
        bc.precision = cfg.precision;
        bc.reps = cfg.reps;
        bc.warmup = cfg.warmup;
        try {
          BenchResult r = run_benchmark(bc);
          if (log != nullptr) {
            fmt::print(*log, "{}^3 {} {}: {:.4g} grid/s\n", n, r.record.variant,
                       r.record.schedule, r.record.grid_per_s);
            for (const auto& w : r.warnings) {
              fmt::print(*log, "  warning: {}\n", w);
            }
          }
          rows.push_back(std::move(r.record));
        } catch (const Error& e) {
          if (log != nullptr) {
            fmt::print(*log, "{}^3 {} {}: failed: {}\n", n, label(variant), label(schedule),
                       e.what());
          }
          BenchRecord failed;
          failed.variant = label(variant);
          failed.schedule = label(schedule);
          failed.nx = failed.ny = failed.nz = n;
          failed.steps = cfg.steps;
          failed.reps = cfg.reps;
          failed.status = "failed";
          rows.push_back(std::move(failed));
        }
      }
    }
  }
  return rows;
}

bool VerifyReport::passed() const noexcept {
  return std::all_of(entries.begin(), entries.end(),
                     [](const VerifyEntry& e) { return e.passed; });
}

namespace {

template <class T>
double max_abs_diff(const BasicGrid<T>& a, const BasicGrid<T>& b) {
  double m = 0.0;
  const Extent3 n = a.interior();
  for (index_t k = 0; k < n.z; ++k) {
    for (index_t j = 0; j < n.y; ++j) {
      for (index_t i = 0; i < n.x; ++i) {
        const double d = std::abs(static_cast<double>(a(i, j, k)) - static_cast<double>(b(i, j, k)));
        m = std::isnan(d) ? INFINITY : std::max(m, d);
      }
    }
  }
  return m;
}

template <class T>
double max_abs(const BasicGrid<T>& a) {
  double m = 0.0;
  for (const T v : a.values()) {
    m = std::max(m, std::abs(static_cast<double>(v)));
  }
  return m;
}

template <class T>
VerifyReport verify_as(const VerifyConfig& cfg) {
  VerifyReport report;
  const bool single = std::is_same_v<T, float>;
  const auto tolerance_for = [&](double scale) {
    return single ? cfg.tolerance_f32 * std::max(scale, 1.0) : cfg.tolerance_f64;
  };

  if (!cfg.variants.empty()) {
    const Spacing h{1.0, 1.0, 1.0};
    BasicGrid<T> u(cfg.interior, cfg.radius, h);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (index_t k = 0; k < cfg.interior.z; ++k) {
      for (index_t j = 0; j < cfg.interior.y; ++j) {
        for (index_t i = 0; i < cfg.interior.x; ++i) {
          u(i, j, k) = static_cast<T>(dist(rng));
        }
      }
    }
    const StencilCoeffs coeffs = derive_coefficients(cfg.radius, h);
    BasicGrid<T> reference(cfg.interior, cfg.radius, h);
    laplacian_direct(u, coeffs, reference);
    const double tol = tolerance_for(max_abs(reference));

    for (const KernelVariant& variant : cfg.variants) {
      StencilCoeffs c = coeffs;
      if (cfg.fault && cfg.fault->variant == label(variant)) {
        const auto m = static_cast<std::size_t>(cfg.fault->offset);
        c.axis.at(static_cast<std::size_t>(cfg.fault->axis)).at(m) *=
            1.0 + cfg.fault->relative_delta;
      }
      const TileMode mode = required_mode(variant).value_or(TileMode::Blocks3D);
      const TilePlan plan = decompose(cfg.interior, mode, natural_tile_block(variant),
                                      cfg.boundary_width);
      BasicGrid<T> out(cfg.interior, cfg.radius, h);
      (void)run_kernel(variant, u, c, plan, out);
      const double diff = max_abs_diff(reference, out);
      report.entries.push_back({label(variant), "kernel", diff, tol, diff <= tol});
    }
  }

  if (!cfg.schedules.empty()) {
    PropagatorConfig pc;
    pc.interior = cfg.interior;
    pc.radius = cfg.radius;
    pc.nsteps = cfg.schedule_steps;
    pc.sponge_width = cfg.boundary_width;
    pc.sponge_strength = 1.0;
    pc.source.position = {cfg.interior.x / 2, cfg.interior.y / 2, cfg.interior.z / 2};
    pc.initial_noise = 1.0;
    pc.seed = cfg.seed;
    pc.schedule = Serial{};
    const auto baseline = propagate<T>(pc, Direct{});
    const double tol = tolerance_for(max_abs(baseline.state.curr));
    for (const Schedule& schedule : cfg.schedules) {
      pc.schedule = schedule;
      const auto run = propagate<T>(pc, Direct{});
      const double diff = max_abs_diff(baseline.state.curr, run.state.curr);
      report.entries.push_back({label(schedule), "schedule", diff, tol, diff <= tol});
    }
  }
  return report;
}

}  // namespace

VerifyReport verify(const VerifyConfig& cfg) {
  return cfg.precision == Precision::F32 ? verify_as<float>(cfg) : verify_as<double>(cfg);
}

}  // namespace wavebench
