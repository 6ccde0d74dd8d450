#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavebench/perfmodel.hpp"
#include "wavebench/record.hpp"

namespace wavebench {

/// Log-log roofline: bandwidth slope then compute plateau, extra cache ceilings dashed,
/// one labelled marker per point. Points above the ceiling carry an out-of-model note.
/// Output bytes depend only on the inputs.
[[nodiscard]] std::string render_roofline_svg(const MachineSpec& spec,
                                              const std::vector<RooflinePoint>& points);
void emit_roofline_svg(const MachineSpec& spec, const std::vector<RooflinePoint>& points,
                       const std::filesystem::path& path);

/// Grid/s against grid size, one polyline per (variant, schedule) over the "ok" rows.
[[nodiscard]] std::string render_throughput_svg(const std::vector<BenchRecord>& records);
void emit_throughput_svg(const std::vector<BenchRecord>& records,
                         const std::filesystem::path& path);

/// Roofline points from bench rows: AI = flops / (reads + writes), GFLOP/s = flops / seconds.
[[nodiscard]] std::vector<RooflinePoint> roofline_points(const std::vector<BenchRecord>& records);

}  // namespace wavebench
