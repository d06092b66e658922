#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "eratray/prime_table.hpp"

namespace eratray {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Truncated decimal expansion of a non-negative rational, `digits`
// significant digits (no rounding: an exact prefix of the expansion).
std::string decimal_string(const BigRational& value, unsigned digits = 30);

struct SeriesOptions {
  // Exact accumulation cost grows with the lcm of the denominators;
  // refuse runaway scans instead of silently degrading.
  std::size_t max_terms = 20'000;
};

// Partial sums of a reciprocal series, accumulated exactly. Terms are the
// denominators in summation order; partial sums are rendered decimals.
struct PartialSumSeries {
  std::string description;
  std::vector<u64> terms;
  std::vector<std::string> partial_sums;  // 30 significant digits each
  BigRational sum;                        // exact
  std::optional<double> tail_bound;       // ray series only

  std::string sum_decimal(unsigned digits = 30) const {
    return decimal_string(sum, digits);
  }
};

// Reciprocals of one ray's elements. The tail bound comes from the
// adjacent-gap estimate: after a last element q >= 3 the remaining terms
// are dominated by a geometric series with ratio 1/ln q, so the tail is
// below 1/(q (ln q - 1)).
PartialSumSeries ray_series(const PrimeTable& table, u64 base, u64 depth,
                            const SeriesOptions& options = {});

enum class TwinSelector { T1, T1u, T1b, Tsr, TsrU, TsrB };

TwinSelector twin_selector_from_string(const std::string& name);
std::string to_string(TwinSelector selector);

// Brun-style sums: 1/p + 1/(p+2) over the selected twin family up to
// `bound` (start primes > 5).
PartialSumSeries twin_series(const PrimeTable& table, TwinSelector selector,
                             u64 bound, const SeriesOptions& options = {});

// Reciprocals down one column of the ray matrix, plus a slow-growth
// diagnostic: the least-squares slope of the partial sums against
// ln ln(row index). Reported, never asserted.
struct ColumnSeries {
  PartialSumSeries series;
  double growth_slope = 0.0;
  double growth_intercept = 0.0;
  std::size_t samples = 0;
};

ColumnSeries column_series(const PrimeTable& table, u64 column, u64 row_count,
                           const SeriesOptions& options = {});

// Ray origins (primes whose index is an extended composite) that sit in no
// twin/triple/quadruple/quintuple cluster with start above 5. Membership
// probes elements up to 12 past the bound, so the table must extend that far.
std::vector<u64> p1_residual(const PrimeTable& table, u64 bound);

}  // namespace eratray
