#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eratray/rays.hpp"

namespace eratray {

// The ray matrix: first column the extended composites in ascending order,
// each row the principal ray of that base. Every prime occurs exactly once
// across all rows.
struct RayMatrix {
  std::vector<Ray> rows;
  RayLimit limit = RayLimit::depth(0);
  u64 table_bound = 0;

  // Equality is over content (bases and elements); truncation reasons and
  // build parameters do not survive serialization round-trips.
  bool operator==(const RayMatrix& other) const {
    if (rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].base != other.rows[i].base ||
          rows[i].elements != other.rows[i].elements)
        return false;
    return true;
  }
};

struct MatrixBuildOptions {
  // Strict mode refuses a build whose deepest requested element is
  // estimated to exceed the table bound instead of truncating rows.
  bool strict = false;
  unsigned threads = 1;
};

RayMatrix build_matrix(const PrimeTable& table, u64 row_count, RayLimit limit,
                       const MatrixBuildOptions& options = {});

// Partition check: every prime <= bound must land on a unique coordinate
// whose base is an extended composite, and the coordinate must round-trip
// through extend_ray. Failures are report content, not errors.
struct PartitionReport {
  u64 bound = 0;
  u64 prime_total = 0;
  u64 located_total = 0;
  u64 roundtrip_failures = 0;
  std::vector<u64> duplicate_primes;  // primes whose coordinate was taken
  std::vector<u64> bases_used;        // distinct bases, ascending
  bool ok() const {
    return located_total == prime_total && duplicate_primes.empty() &&
           roundtrip_failures == 0;
  }
};

PartitionReport verify_partition(const PrimeTable& table, u64 bound,
                                 unsigned threads = 1);

enum class MatrixFormat { Csv, JsonLines, AlignedText };

std::string export_matrix(const RayMatrix& m, MatrixFormat format);
RayMatrix import_matrix(const std::string& text, MatrixFormat format);

MatrixFormat matrix_format_from_string(const std::string& name);

}  // namespace eratray
