#include "cli.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wavebench/bench.hpp"
#include "wavebench/csv.hpp"
#include "wavebench/error.hpp"
#include "wavebench/perfmodel.hpp"
#include "wavebench/svg.hpp"

namespace wavebench::cli {

namespace {

std::vector<index_t> parse_ints(const std::string& text, std::string_view flag) {
  std::vector<index_t> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size()) {
        throw std::invalid_argument(part);
      }
      values.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigurationError(fmt::format("{}: '{}' is not an integer list", flag, text));
    }
  }
  return values;
}

Extent3 parse_extent3(const std::string& text, std::string_view flag, bool allow_scalar) {
  const auto v = parse_ints(text, flag);
  if (allow_scalar && v.size() == 1) {
    return {v[0], v[0], v[0]};
  }
  if (v.size() != 3) {
    throw ConfigurationError(fmt::format("{} expects {}NX,NY,NZ", flag, allow_scalar ? "N or " : ""));
  }
  return {v[0], v[1], v[2]};
}

Extent2 parse_extent2(const std::string& text, std::string_view flag) {
  const auto v = parse_ints(text, flag);
  if (v.size() != 2) {
    throw ConfigurationError(fmt::format("{} expects PX,PY", flag));
  }
  return {v[0], v[1]};
}

/// Flags shared by every subcommand; parsed into library types once CLI11 is done.
struct Common {
  std::string grid;
  std::int64_t steps = 20;
  std::vector<std::string> variants;
  std::string block;
  std::string plane = "16,16";
  std::vector<std::string> schedules;
  int lanes = 2;
  std::string precision = "f64";
  index_t halo = 4;
  index_t sponge = 0;
  double sponge_strength = 2.0;
  std::string csv;
  std::string svg;
  std::string machine_spec;
  std::uint64_t seed = 0;
  double noise = 0.0;
  int reps = 3;
  int warmup = 1;
  std::string trace;

  [[nodiscard]] Extent3 interior(Extent3 fallback = {48, 48, 48}) const {
    return grid.empty() ? fallback : parse_extent3(grid, "--grid", true);
  }
  [[nodiscard]] Extent2 plane_extent() const { return parse_extent2(plane, "--plane"); }
  [[nodiscard]] Precision prec() const { return parse_precision(precision); }

  [[nodiscard]] std::vector<KernelVariant> variant_list(std::vector<std::string> fallback) const {
    const Extent3 b = block.empty() ? Extent3{8, 8, 8} : parse_extent3(block, "--block", false);
    std::vector<KernelVariant> out;
    for (const auto& name : variants.empty() ? fallback : variants) {
      out.push_back(parse_variant(name, b, plane_extent()));
    }
    return out;
  }

  [[nodiscard]] std::vector<Schedule> schedule_list(std::vector<std::string> fallback) const {
    std::vector<Schedule> out;
    for (const auto& name : schedules.empty() ? fallback : schedules) {
      out.push_back(parse_schedule(name, lanes));
    }
    return out;
  }

  [[nodiscard]] PropagatorConfig propagator() const {
    PropagatorConfig pc;
    pc.interior = interior();
    pc.radius = halo;
    pc.nsteps = steps;
    pc.sponge_width = sponge;
    pc.sponge_strength = sponge > 0 ? sponge_strength : 0.0;
    pc.source.position = {pc.interior.x / 2, pc.interior.y / 2, pc.interior.z / 2};
    pc.initial_noise = noise;
    pc.seed = seed;
    if (!block.empty()) {
      pc.tile_block = parse_extent3(block, "--block", false);
    }
    return pc;
  }

  /// As propagator(), with the inner tile matched to the variant's launch shape.
  [[nodiscard]] PropagatorConfig propagator_for(const KernelVariant& v) const {
    PropagatorConfig pc = propagator();
    if (!std::holds_alternative<Direct>(v)) {
      pc.tile_block = natural_tile_block(v, pc.tile_block);
    }
    return pc;
  }
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--grid", c.grid, "Interior size N or NX,NY,NZ (default 48; verify 32)");
  app.add_option("--steps", c.steps, "Time steps")->capture_default_str();
  app.add_option("--variant", c.variants, "direct|tiled3d|stream-fixed|semi");
  app.add_option("--block", c.block, "Tiled3D block / Direct tile DX,DY,DZ");
  app.add_option("--plane", c.plane, "Streaming plane PX,PY")->capture_default_str();
  app.add_option("--schedule", c.schedules, "serial|coarse|fine");
  app.add_option("--lanes", c.lanes, "Worker lanes for the fine schedule")->capture_default_str();
  app.add_option("--precision", c.precision, "f32|f64")->capture_default_str();
  app.add_option("--halo", c.halo, "Stencil radius R")->capture_default_str();
  app.add_option("--sponge", c.sponge, "Absorbing layer width W")->capture_default_str();
  app.add_option("--sponge-strength", c.sponge_strength, "Absorbing layer strength")
      ->capture_default_str();
  app.add_option("--csv", c.csv, "CSV path");
  app.add_option("--svg", c.svg, "SVG path");
  app.add_option("--machine-spec", c.machine_spec, "Machine spec file (key=value)");
  app.add_option("--seed", c.seed, "Seed for the initial noise")->capture_default_str();
  app.add_option("--noise", c.noise, "Initial uniform noise amplitude")->capture_default_str();
  app.add_option("--reps", c.reps, "Timed repetitions")->capture_default_str();
  app.add_option("--warmup", c.warmup, "Untimed warmup runs")->capture_default_str();
  app.add_option("--trace", c.trace, "Task trace output path");
}

void print_record(std::ostream& out, const BenchRecord& r) {
  fmt::print(out,
             "{} {} {}x{}x{} steps={} reps={}: {:.6g} s median, {:.6g} grid/s, "
             "{} flops, {} B read, {} B written, {} B scratch peak\n",
             r.variant, r.schedule, r.nx, r.ny, r.nz, r.steps, r.reps, r.seconds_median,
             r.grid_per_s, r.flops, r.ideal_reads_bytes, r.ideal_writes_bytes,
             r.scratch_peak_bytes);
}

int cmd_run(const Common& c, std::ostream& out, std::ostream& err) {
  const auto variants = c.variant_list({"direct"});
  const auto schedules = c.schedule_list({"serial"});
  if (variants.size() != 1 || schedules.size() != 1) {
    throw ConfigurationError("run takes one --variant and one --schedule; use sweep for more");
  }
  BenchConfig bc;
  bc.propagator = c.propagator_for(variants.front());
  bc.propagator.schedule = schedules.front();
  bc.variant = variants.front();
  bc.precision = c.prec();
  bc.reps = c.reps;
  bc.warmup = c.warmup;
  bc.trace_path = c.trace;
  std::optional<MachineSpec> spec;
  if (!c.machine_spec.empty()) {
    spec = load_machine_spec(c.machine_spec);
  } else if (!c.svg.empty()) {
    throw ConfigurationError("run --svg draws a roofline and needs --machine-spec");
  }

  BenchRecord record;
  int code = kExitOk;
  try {
    BenchResult r = run_benchmark(bc);
    for (const auto& w : r.warnings) {
      fmt::print(err, "warning: {}\n", w);
    }
    record = std::move(r.record);
    print_record(out, record);
  } catch (const NumericalBlowupError& e) {
    fmt::print(err, "numerical blowup: {}\n", e.what());
    record.variant = label(bc.variant);
    record.schedule = label(bc.propagator.schedule);
    record.nx = bc.propagator.interior.x;
    record.ny = bc.propagator.interior.y;
    record.nz = bc.propagator.interior.z;
    record.steps = bc.propagator.nsteps;
    record.reps = bc.reps;
    record.status = "blowup";
    code = kExitBlowup;
  }
  if (!c.csv.empty()) {
    write_csv(c.csv, {record});
  }
  if (spec && code == kExitOk) {
    const auto points = roofline_points({record});
    for (const auto& p : points) {
      fmt::print(out, "AI {:.4g} FLOP/B, {:.6g} GFLOP/s, roofline {:.6g} GFLOP/s on {}\n",
                 p.arithmetic_intensity, p.performance,
                 roofline_attainable(*spec, p.arithmetic_intensity), spec->name);
    }
    if (!c.svg.empty()) {
      emit_roofline_svg(*spec, points, c.svg);
    }
  }
  return code;
}

int cmd_sweep(const Common& c, const std::string& sizes, std::ostream& out) {
  SweepConfig sc;
  sc.sizes = parse_ints(sizes, "--sizes");
  sc.variants = c.variant_list({"direct"});
  sc.schedules = c.schedule_list({"serial", "fine"});
  sc.steps = c.steps;
  sc.reps = c.reps;
  sc.warmup = c.warmup;
  sc.precision = c.prec();
  sc.base = c.propagator();
  const auto rows = sweep(sc, &out);
  if (!c.csv.empty()) {
    write_csv(c.csv, rows);
  }
  if (!c.svg.empty()) {
    emit_throughput_svg(rows, c.svg);
  }
  const bool any_failed =
      std::any_of(rows.begin(), rows.end(), [](const BenchRecord& r) { return r.status != "ok"; });
  return any_failed ? kExitBreach : kExitOk;
}

int cmd_verify(const Common& c, const std::string& fault, std::ostream& out) {
  VerifyConfig vc;
  vc.interior = c.interior({32, 32, 32});
  vc.radius = c.halo;
  vc.variants = c.variant_list({"direct", "tiled3d", "stream-fixed", "semi"});
  vc.schedules = c.schedule_list({"serial", "coarse", "fine"});
  vc.schedule_steps = c.steps;
  vc.seed = c.seed == 0 ? 1 : c.seed;
  vc.precision = c.prec();
  if (c.sponge > 0) {
    vc.boundary_width = c.sponge;
  }
  if (!fault.empty()) {
    vc.fault = CoefficientFault{fault};
  }
  const VerifyReport report = verify(vc);
  for (const VerifyEntry& e : report.entries) {
    fmt::print(out, "{} {:<8} {:<14} max_abs_diff={:.3e} tol={:.3e}\n",
               e.passed ? "PASS" : "FAIL", e.kind, e.name, e.max_abs_diff, e.tolerance);
  }
  fmt::print(out, "{}\n", report.passed() ? "verification passed" : "verification breach");
  return report.passed() ? kExitOk : kExitBreach;
}

RooflinePoint parse_point(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ConfigurationError("--point expects LABEL:AI:GFLOPS, got '" + text + "'");
  }
  try {
    return {text.substr(0, first), std::stod(text.substr(first + 1, second - first - 1)),
            std::stod(text.substr(second + 1))};
  } catch (const std::logic_error&) {
    throw ConfigurationError("--point expects LABEL:AI:GFLOPS, got '" + text + "'");
  }
}

int cmd_roofline(const Common& c, const std::vector<std::string>& point_args, std::ostream& out) {
  if (c.machine_spec.empty()) {
    throw ConfigurationError("roofline needs --machine-spec");
  }
  const MachineSpec spec = load_machine_spec(c.machine_spec);
  std::vector<RooflinePoint> points;
  if (!c.csv.empty()) {
    points = roofline_points(read_csv(c.csv));
  }
  for (const auto& p : point_args) {
    points.push_back(parse_point(p));
  }
  fmt::print(out, "{}: peak {:.6g} GFLOP/s, {:.6g} GB/s, ridge {:.4g} FLOP/B\n", spec.name,
             spec.peak_gflops, spec.mem_bw_gbs, ridge_point(spec));
  for (const Ceiling& ceiling : spec.cache_ceilings) {
    fmt::print(out, "  {} ceiling {:.6g} GB/s\n", ceiling.name, ceiling.bandwidth_gbs);
  }
  for (const auto& p : points) {
    const double roof = roofline_attainable(spec, p.arithmetic_intensity);
    fmt::print(out, "{}: AI {:.4g}, {:.6g} GFLOP/s of {:.6g} attainable ({:.1f}%){}\n", p.label,
               p.arithmetic_intensity, p.performance, roof, 100.0 * p.performance / roof,
               p.performance > roof ? " above roofline: out of model" : "");
  }
  if (!c.svg.empty()) {
    emit_roofline_svg(spec, points, c.svg);
  }
  return kExitOk;
}

int cmd_model(const Common& c, std::ostream& out) {
  const Extent3 interior = c.interior();
  const auto variants = c.variant_list({"direct", "tiled3d", "stream-fixed", "semi"});
  const std::size_t elem = c.prec() == Precision::F32 ? sizeof(float) : sizeof(double);
  std::optional<MachineSpec> spec;
  if (!c.machine_spec.empty()) {
    spec = load_machine_spec(c.machine_spec);
  }
  const Extent3 b = c.block.empty() ? Extent3{8, 8, 8} : parse_extent3(c.block, "--block", false);
  const TileFootprint fp = tile_footprint(b, c.halo);
  const Fraction ratio = plane_ratio(c.plane_extent(), c.halo);
  fmt::print(out, "tile_footprint({},{},{}; R={}) = {} ({} block + {} halo)\n", b.x, b.y, b.z,
             c.halo, fp.total, fp.block_points, fp.halo_points);
  fmt::print(out, "plane ratio (R={}) = {}/{}\n", c.halo, ratio.num, ratio.den);
  for (const KernelVariant& v : variants) {
    const PropagatorConfig pc = c.propagator_for(v);
    const TileMode mode = required_mode(v).value_or(TileMode::Blocks3D);
    const TilePlan plan = decompose(pc.interior, mode, pc.tile_block, pc.sponge_width);
    validate_kernel_config(v, plan, c.halo, elem);
    const Traffic t = traffic_model(v, c.halo, plan, elem);
    const std::uint64_t flops =
        static_cast<std::uint64_t>(interior.volume()) * kernel_flops_per_point(v, c.halo);
    const double ai = arithmetic_intensity(static_cast<double>(flops),
                                           static_cast<double>(t.ideal_reads + t.ideal_writes));
    fmt::print(out, "{}: per step {} B read, {} B written, {} flops, AI {:.4g}", label(v),
               t.ideal_reads, t.ideal_writes, flops, ai);
    if (spec) {
      fmt::print(out, ", roofline {:.6g} GFLOP/s on {}", roofline_attainable(*spec, ai), spec->name);
    }
    fmt::print(out, "\n");
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-difference wave-propagation benchmark"};
  app.require_subcommand(1);
  Common run_opts;
  Common sweep_opts;
  Common verify_opts;
  Common roofline_opts;
  Common model_opts;
  std::string sizes = "16,24,32,40,48";
  std::string fault;
  std::vector<std::string> points;

  auto* run = app.add_subcommand("run", "Time one configuration");
  add_common(*run, run_opts);
  auto* sw = app.add_subcommand("sweep", "Time a grid of sizes, variants and schedules");
  add_common(*sw, sweep_opts);
  sw->add_option("--sizes", sizes, "Cubic sizes, strictly increasing")->capture_default_str();
  auto* ver = app.add_subcommand("verify", "Check kernels and schedules against references");
  add_common(*ver, verify_opts);
  ver->add_option("--inject-fault", fault, "Perturb one coefficient of the named variant");
  auto* roof = app.add_subcommand("roofline", "Place measurements on a machine roofline");
  add_common(*roof, roofline_opts);
  roof->add_option("--point", points, "Extra point LABEL:AI:GFLOPS");
  auto* model = app.add_subcommand("model", "Print the analytic traffic model");
  add_common(*model, model_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, out, err);
    if (*sw) return cmd_sweep(sweep_opts, sizes, out);
    if (*ver) return cmd_verify(verify_opts, fault, out);
    if (*roof) return cmd_roofline(roofline_opts, points, out);
    return cmd_model(model_opts, out);
  } catch (const NumericalBlowupError& e) {
    fmt::print(err, "numerical blowup: {}\n", e.what());
    return kExitBlowup;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
}

}  // namespace wavebench::cli
