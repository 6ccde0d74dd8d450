#include "wavebench/perfmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace wavebench {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_positive(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v) || v <= 0.0) {
    throw ConfigurationError("machine spec key '" + std::string(key) +
                             "' needs a positive number, got '" + std::string(value) + "'");
  }
  return v;
}

std::uint64_t u64(index_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

MachineSpec parse_machine_spec(std::string_view text) {
  MachineSpec spec;
  bool has_name = false;
  bool has_peak = false;
  bool has_bw = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigurationError("machine spec line " + std::to_string(line_no) +
                               " is not key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    constexpr std::string_view bw_suffix = "_bw_gbs";
    if (key == "name") {
      if (value.empty()) {
        throw ConfigurationError("machine spec name is empty");
      }
      spec.name = std::string(value);
      has_name = true;
    } else if (key == "peak_gflops") {
      spec.peak_gflops = parse_positive(key, value);
      has_peak = true;
    } else if (key == "mem_bw_gbs") {
      spec.mem_bw_gbs = parse_positive(key, value);
      has_bw = true;
    } else if (key.size() > bw_suffix.size() && key.ends_with(bw_suffix)) {
      spec.cache_ceilings.push_back(
          {std::string(key.substr(0, key.size() - bw_suffix.size())),
           parse_positive(key, value)});
    } else {
      throw ConfigurationError("unknown machine spec key '" + std::string(key) + "'");
    }
  }
  if (!has_name || !has_peak || !has_bw) {
    throw ConfigurationError("machine spec needs name, peak_gflops and mem_bw_gbs");
  }
  return spec;
}

MachineSpec load_machine_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError("cannot open machine spec " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_machine_spec(ss.str());
}

TileFootprint tile_footprint(Extent3 block, index_t radius) {
  if (block.x < 1 || block.y < 1 || block.z < 1 || radius < 0) {
    throw DimensionError("tile footprint needs block >= 1 and R >= 0");
  }
  TileFootprint f;
  f.block_points = u64(block.volume());
  f.halo_points = u64((block.x * block.y + block.x * block.z + block.y * block.z) * radius * 2);
  f.total = f.block_points + f.halo_points;
  return f;
}

std::uint64_t plane_footprint(Extent2 plane, index_t radius) {
  if (plane.x < 1 || plane.y < 1 || radius < 0) {
    throw DimensionError("plane footprint needs plane >= 1 and R >= 0");
  }
  return u64((plane.x + 2 * radius) * (plane.y + 2 * radius));
}

Fraction plane_ratio(Extent2 plane, index_t radius) {
  const std::uint64_t one = plane_footprint(plane, radius);
  const std::uint64_t all = one * u64(2 * radius + 1);
  const std::uint64_t g = std::gcd(one, all);
  return {one / g, all / g};
}

double arithmetic_intensity(double flops, double bytes_moved) {
  if (!(bytes_moved > 0.0)) {
    throw UndefinedIntensityError("arithmetic intensity is undefined for zero bytes moved");
  }
  return flops / bytes_moved;
}

double roofline_attainable(double peak_gflops, double bandwidth_gbs, double ai) {
  return std::min(peak_gflops, ai * bandwidth_gbs);
}

double roofline_attainable(const MachineSpec& spec, double ai) {
  return roofline_attainable(spec.peak_gflops, spec.mem_bw_gbs, ai);
}

double ridge_point(const MachineSpec& spec) { return spec.peak_gflops / spec.mem_bw_gbs; }

Traffic traffic_model(const KernelVariant& variant, index_t radius, const TilePlan& plan,
                      std::size_t element_size) {
  const std::uint64_t R = u64(radius);
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  for (const Tile& tile : plan.tiles) {
    const std::uint64_t v = u64(tile.volume());
    if (std::holds_alternative<Direct>(variant)) {
      reads += v * (6 * R + 1);
      writes += v;
    } else if (const auto* t = std::get_if<Tiled3D>(&variant)) {
      for (const Tile& b : split_tile(tile, t->block)) {
        reads += tile_footprint(b.dims, radius).total;
      }
      writes += v;
    } else {
      const Extent2 p = std::holds_alternative<StreamFixed>(variant)
                            ? std::get<StreamFixed>(variant).plane
                            : std::get<SemiStencil>(variant).plane;
      const bool semi = std::holds_alternative<SemiStencil>(variant);
      for (const Tile& col : split_tile(tile, {p.x, p.y, tile.dims.z})) {
        const std::uint64_t lanes = u64(col.dims.x * col.dims.y);
        const std::uint64_t dz = u64(col.dims.z);
        reads += (dz + 2 * R) * lanes + dz * 2 * R * u64(col.dims.x + col.dims.y);
        if (semi) {
          reads += dz * lanes;
        }
      }
      writes += semi ? 2 * v : v;
    }
  }
  return {reads * element_size, writes * element_size};
}

}  // namespace wavebench
