#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wavebench/record.hpp"

namespace wavebench {

inline constexpr std::string_view kCsvHeader =
    "variant,schedule,nx,ny,nz,steps,reps,seconds_median,grid_per_s,flops,ideal_reads_bytes,"
    "ideal_writes_bytes,scratch_peak_bytes,status";

/// Header line plus one row per record. Doubles use the shortest round-trip form.
[[nodiscard]] std::string format_csv(const std::vector<BenchRecord>& records);
[[nodiscard]] std::vector<BenchRecord> parse_csv(std::string_view text);

void write_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records);
[[nodiscard]] std::vector<BenchRecord> read_csv(const std::filesystem::path& path);

}  // namespace wavebench
