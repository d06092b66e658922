#include "eratray/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace eratray {

RayMatrix build_matrix(const PrimeTable& table, u64 row_count, RayLimit limit,
                       const MatrixBuildOptions& options) {
  if (row_count < 1)
    raise(ErrorCode::InvalidArgument, "matrix needs at least one row");

  const std::vector<u64> bases = extended_composites(table, row_count);

  if (options.strict && limit.kind == RayLimit::Kind::Depth) {
    // Rough growth estimate: each step multiplies by ~ln of the current
    // element; refuse only when even the first row cannot reach the depth.
    double v = 2.0;
    for (u64 k = 1; k < limit.value; ++k) v *= std::max(std::log(v), 1.0);
    if (v > static_cast<double>(table.bound()))
      raise(ErrorCode::ResourceLimit,
            "depth " + std::to_string(limit.value) +
                " exceeds the table bound; build with a larger sieve");
  }

  RayMatrix m;
  m.limit = limit;
  m.table_bound = table.bound();
  m.rows.resize(bases.size());

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < bases.size(); ++i)
      m.rows[i] = extend_ray(table, bases[i], limit);
  } else {
    // Rows are independent; chunked fan-out with ordered assembly keeps
    // the result identical to the sequential build.
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (bases.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(bases.size(), lo + chunk);
      if (lo >= hi) break;
      jobs.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          m.rows[i] = extend_ray(table, bases[i], limit);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  return m;
}

PartitionReport verify_partition(const PrimeTable& table, u64 bound,
                                 unsigned threads) {
  if (bound > table.bound())
    raise(ErrorCode::OutOfRange, "partition bound beyond table");

  PartitionReport report;
  report.bound = bound;
  report.prime_total = bound >= 2 ? table.prime_count(bound) : 0;

  struct Chunk {
    std::vector<std::pair<RayCoordinate, u64>> coords;
    u64 roundtrip_failures = 0;
  };

  auto scan = [&](u64 lo, u64 hi) {
    Chunk c;
    for (u64 p = lo; p <= hi; ++p) {
      if (p < 2 || !table.is_prime(p)) continue;
      const RayCoordinate rc = locate(table, p);
      c.coords.emplace_back(rc, p);
      const Ray ray = extend_ray(table, rc.base, RayLimit::depth(rc.index));
      if (ray.elements.size() < rc.index ||
          ray.elements[rc.index - 1] != p)
        ++c.roundtrip_failures;
    }
    return c;
  };

  std::vector<Chunk> chunks;
  const unsigned nthreads = std::max(1u, threads);
  if (nthreads == 1 || bound < 1000) {
    chunks.push_back(scan(2, bound));
  } else {
    std::vector<std::future<Chunk>> jobs;
    const u64 span = (bound - 1) / nthreads + 1;
    for (unsigned t = 0; t < nthreads; ++t) {
      const u64 lo = 2 + t * span;
      if (lo > bound) break;
      const u64 hi = std::min(bound, lo + span - 1);
      jobs.push_back(std::async(std::launch::async, scan, lo, hi));
    }
    for (auto& j : jobs) chunks.push_back(j.get());
  }

  std::map<std::pair<u64, u64>, u64> seen;
  std::vector<u64> bases;
  for (const Chunk& c : chunks) {
    report.roundtrip_failures += c.roundtrip_failures;
    for (const auto& [rc, p] : c.coords) {
      ++report.located_total;
      const auto key = std::make_pair(rc.base, rc.index);
      if (auto it = seen.find(key); it != seen.end())
        report.duplicate_primes.push_back(p);
      else
        seen.emplace(key, p);
      bases.push_back(rc.base);
    }
  }
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  report.bases_used = std::move(bases);
  return report;
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr const char* kCsvHeader = "base,elements";
constexpr int kAlignedPerLine = 5;

std::string export_csv(const RayMatrix& m) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const Ray& r : m.rows) {
    out << r.base;
    for (u64 e : r.elements) out << ',' << e;
    out << '\n';
  }
  return out.str();
}

std::string export_jsonl(const RayMatrix& m) {
  std::ostringstream out;
  for (const Ray& r : m.rows) {
    nlohmann::ordered_json row;
    row["base"] = r.base;
    row["elements"] = r.elements;
    out << row.dump() << '\n';
  }
  return out.str();
}

std::string export_aligned(const RayMatrix& m) {
  std::size_t value_width = 1;
  std::size_t base_width = 4;
  for (const Ray& r : m.rows) {
    base_width = std::max(base_width, std::to_string(r.base).size());
    for (u64 e : r.elements)
      value_width = std::max(value_width, std::to_string(e).size());
  }
  std::ostringstream out;
  for (const Ray& r : m.rows) {
    for (std::size_t i = 0; i < r.elements.size() || i == 0;
         i += kAlignedPerLine) {
      if (i == 0)
        out << std::setw(static_cast<int>(base_width)) << r.base;
      else
        out << std::string(base_width, ' ');
      out << " |";
      for (std::size_t k = i;
           k < std::min(r.elements.size(), i + kAlignedPerLine); ++k)
        out << ' ' << std::setw(static_cast<int>(value_width))
            << r.elements[k];
      out << '\n';
    }
  }
  return out.str();
}

std::vector<u64> parse_numbers(const std::string& text, char sep) {
  std::vector<u64> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) {
    if (token.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stoull(token));
  }
  return out;
}

RayMatrix import_csv(const std::string& text) {
  RayMatrix m;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line.rfind("base", 0) == 0) continue;  // header
    }
    const std::vector<u64> nums = parse_numbers(line, ',');
    if (nums.empty()) raise(ErrorCode::InvalidFormat, "bad csv row: " + line);
    Ray r;
    r.base = nums.front();
    r.elements.assign(nums.begin() + 1, nums.end());
    m.rows.push_back(std::move(r));
  }
  return m;
}

RayMatrix import_jsonl(const std::string& text) {
  RayMatrix m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("base") ||
        !row.contains("elements"))
      raise(ErrorCode::InvalidFormat, "bad jsonl row: " + line);
    Ray r;
    r.base = row["base"].get<u64>();
    r.elements = row["elements"].get<std::vector<u64>>();
    m.rows.push_back(std::move(r));
  }
  return m;
}

RayMatrix import_aligned(const std::string& text) {
  RayMatrix m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t bar = line.find('|');
    if (bar == std::string::npos) {
      if (line.find_first_not_of(" \t") != std::string::npos)
        raise(ErrorCode::InvalidFormat, "bad aligned row: " + line);
      continue;
    }
    const std::string head = line.substr(0, bar);
    const std::vector<u64> values = parse_numbers(line.substr(bar + 1), ' ');
    if (head.find_first_not_of(" \t") != std::string::npos) {
      Ray r;
      r.base = std::stoull(head);
      r.elements = values;
      m.rows.push_back(std::move(r));
    } else {
      if (m.rows.empty())
        raise(ErrorCode::InvalidFormat, "continuation before any row");
      auto& els = m.rows.back().elements;
      els.insert(els.end(), values.begin(), values.end());
    }
  }
  return m;
}

}  // namespace

std::string export_matrix(const RayMatrix& m, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::Csv: return export_csv(m);
    case MatrixFormat::JsonLines: return export_jsonl(m);
    case MatrixFormat::AlignedText: return export_aligned(m);
  }
  raise(ErrorCode::InvalidFormat, "unknown matrix format");
}

RayMatrix import_matrix(const std::string& text, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::Csv: return import_csv(text);
    case MatrixFormat::JsonLines: return import_jsonl(text);
    case MatrixFormat::AlignedText: return import_aligned(text);
  }
  raise(ErrorCode::InvalidFormat, "unknown matrix format");
}

MatrixFormat matrix_format_from_string(const std::string& name) {
  if (name == "csv") return MatrixFormat::Csv;
  if (name == "jsonl" || name == "json-lines") return MatrixFormat::JsonLines;
  if (name == "aligned" || name == "text") return MatrixFormat::AlignedText;
  raise(ErrorCode::InvalidFormat, "unknown matrix format: " + name);
}

}  // namespace eratray
