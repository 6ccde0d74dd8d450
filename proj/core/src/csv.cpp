#include "wavebench/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wavebench/error.hpp"

namespace wavebench {

namespace {

constexpr std::size_t kColumns = 14;

void append_text(std::string& out, std::string_view field) {
  if (field.find_first_of(",\n\r\"") != std::string_view::npos) {
    throw ConfigurationError("CSV field '" + std::string(field) +
                             "' contains a separator or quote");
  }
  out += field;
}

template <class N>
void append_number(std::string& out, N value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  out.append(buf.data(), ptr);
}

template <class N>
N parse_number(std::string_view field, std::string_view column, std::size_t line) {
  N value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ConfigurationError("CSV line " + std::to_string(line) + ": bad " +
                             std::string(column) + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const BenchRecord& r : records) {
    append_text(out, r.variant);
    out += ',';
    append_text(out, r.schedule);
    out += ',';
    append_number(out, r.nx);
    out += ',';
    append_number(out, r.ny);
    out += ',';
    append_number(out, r.nz);
    out += ',';
    append_number(out, r.steps);
    out += ',';
    append_number(out, r.reps);
    out += ',';
    append_number(out, r.seconds_median);
    out += ',';
    append_number(out, r.grid_per_s);
    out += ',';
    append_number(out, r.flops);
    out += ',';
    append_number(out, r.ideal_reads_bytes);
    out += ',';
    append_number(out, r.ideal_writes_bytes);
    out += ',';
    append_number(out, r.scratch_peak_bytes);
    out += ',';
    append_text(out, r.status);
    out += '\n';
  }
  return out;
}

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> records;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    if (!seen_header) {
      if (line != kCsvHeader) {
        throw ConfigurationError("CSV header does not match the expected schema");
      }
      seen_header = true;
      continue;
    }
    std::array<std::string_view, kColumns> f{};
    std::size_t n = 0;
    while (true) {
      const auto comma = line.find(',');
      if (n == kColumns) {
        throw ConfigurationError("CSV line " + std::to_string(line_no) + " has too many fields");
      }
      f[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) {
        break;
      }
      line = line.substr(comma + 1);
    }
    if (n != kColumns) {
      throw ConfigurationError("CSV line " + std::to_string(line_no) + " has " +
                               std::to_string(n) + " fields, expected " +
                               std::to_string(kColumns));
    }
    BenchRecord r;
    r.variant = std::string(f[0]);
    r.schedule = std::string(f[1]);
    r.nx = parse_number<index_t>(f[2], "nx", line_no);
    r.ny = parse_number<index_t>(f[3], "ny", line_no);
    r.nz = parse_number<index_t>(f[4], "nz", line_no);
    r.steps = parse_number<std::int64_t>(f[5], "steps", line_no);
    r.reps = parse_number<std::int64_t>(f[6], "reps", line_no);
    r.seconds_median = parse_number<double>(f[7], "seconds_median", line_no);
    r.grid_per_s = parse_number<double>(f[8], "grid_per_s", line_no);
    r.flops = parse_number<std::uint64_t>(f[9], "flops", line_no);
    r.ideal_reads_bytes = parse_number<std::uint64_t>(f[10], "ideal_reads_bytes", line_no);
    r.ideal_writes_bytes = parse_number<std::uint64_t>(f[11], "ideal_writes_bytes", line_no);
    r.scratch_peak_bytes = parse_number<std::uint64_t>(f[12], "scratch_peak_bytes", line_no);
    r.status = std::string(f[13]);
    records.push_back(std::move(r));
  }
  if (!seen_header) {
    throw ConfigurationError("CSV input is empty");
  }
  return records;
}

void write_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigurationError("cannot write CSV to " + path.string());
  }
  out << format_csv(records);
}

std::vector<BenchRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigurationError("cannot read CSV " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace wavebench
