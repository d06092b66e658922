#include "eratray/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "eratray/coagulates.hpp"
#include "eratray/rays.hpp"

namespace eratray {

std::string decimal_string(const BigRational& value, unsigned digits) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  BigInt num = numerator(value);
  const BigInt den = denominator(value);
  if (num < 0) raise(ErrorCode::InvalidDomain, "negative values unsupported");
  if (digits == 0) digits = 1;

  const BigInt ipart = num / den;
  std::string out = ipart.str();
  unsigned significant = ipart == 0 ? 0 : static_cast<unsigned>(out.size());

  BigInt rem = num % den;
  if (rem == 0) return out;
  out.push_back('.');
  while (significant < digits) {
    rem *= 10;
    const BigInt digit = rem / den;
    rem %= den;
    out.push_back(static_cast<char>('0' + digit.convert_to<int>()));
    if (significant > 0 || digit != 0) ++significant;
    if (rem == 0) break;
  }
  return out;
}

namespace {

PartialSumSeries accumulate(std::string description, std::vector<u64> denoms,
                            const SeriesOptions& options) {
  if (denoms.size() > options.max_terms)
    raise(ErrorCode::ResourceLimit,
          "series has " + std::to_string(denoms.size()) +
              " terms; exact accumulation capped at " +
              std::to_string(options.max_terms));
  PartialSumSeries s;
  s.description = std::move(description);
  s.terms = std::move(denoms);
  BigRational sum = 0;
  s.partial_sums.reserve(s.terms.size());
  for (u64 d : s.terms) {
    sum += BigRational(1, d);
    s.partial_sums.push_back(decimal_string(sum));
  }
  s.sum = sum;
  return s;
}

}  // namespace

PartialSumSeries ray_series(const PrimeTable& table, u64 base, u64 depth,
                            const SeriesOptions& options) {
  const Ray ray = extend_ray(table, base, RayLimit::depth(depth));
  PartialSumSeries s = accumulate(
      "ray base " + std::to_string(base), ray.elements, options);
  if (!ray.elements.empty()) {
    const double q = static_cast<double>(ray.elements.back());
    if (q >= 3.0) s.tail_bound = 1.0 / (q * (std::log(q) - 1.0));
  }
  return s;
}

TwinSelector twin_selector_from_string(const std::string& name) {
  if (name == "T1") return TwinSelector::T1;
  if (name == "T1u") return TwinSelector::T1u;
  if (name == "T1b") return TwinSelector::T1b;
  if (name == "Tsr") return TwinSelector::Tsr;
  if (name == "TsrU") return TwinSelector::TsrU;
  if (name == "TsrB") return TwinSelector::TsrB;
  raise(ErrorCode::InvalidArgument, "unknown twin selector: " + name);
}

std::string to_string(TwinSelector selector) {
  switch (selector) {
    case TwinSelector::T1: return "T1";
    case TwinSelector::T1u: return "T1u";
    case TwinSelector::T1b: return "T1b";
    case TwinSelector::Tsr: return "Tsr";
    case TwinSelector::TsrU: return "TsrU";
    case TwinSelector::TsrB: return "TsrB";
  }
  return "?";
}

PartialSumSeries twin_series(const PrimeTable& table, TwinSelector selector,
                             u64 bound, const SeriesOptions& options) {
  if (bound > table.bound())
    raise(ErrorCode::OutOfRange, "bound beyond table");

  const bool sr = selector == TwinSelector::Tsr ||
                  selector == TwinSelector::TsrU ||
                  selector == TwinSelector::TsrB;
  std::vector<u64> denoms;
  for (u64 p = 7; p + 2 <= bound; p += 2) {
    if (!table.is_prime(p) || !table.is_prime(p + 2)) continue;
    if (sr && !(cdc(table, p + 2, 3) == Rational{1, 1})) continue;
    if (selector != TwinSelector::T1 && selector != TwinSelector::Tsr) {
      const TwinRecord rec = classify_twin(table, p);
      const bool want_u = selector == TwinSelector::T1u ||
                          selector == TwinSelector::TsrU;
      if ((rec.twin_class == TwinClass::U) != want_u) continue;
    }
    denoms.push_back(p);
    denoms.push_back(p + 2);
  }
  return accumulate(to_string(selector) + " <= " + std::to_string(bound),
                    std::move(denoms), options);
}

ColumnSeries column_series(const PrimeTable& table, u64 column, u64 row_count,
                           const SeriesOptions& options) {
  if (column < 1) raise(ErrorCode::InvalidArgument, "columns start at 1");
  const std::vector<u64> bases = extended_composites(table, row_count);
  std::vector<u64> denoms;
  denoms.reserve(bases.size());
  for (u64 base : bases) {
    const Ray ray = extend_ray(table, base, RayLimit::depth(column));
    if (ray.elements.size() < column)
      raise(ErrorCode::OutOfRange,
            "column " + std::to_string(column) + " of base " +
                std::to_string(base) + " exceeds the table bound");
    denoms.push_back(ray.elements[column - 1]);
  }

  ColumnSeries out;
  out.series = accumulate("column " + std::to_string(column),
                          std::move(denoms), options);

  // least squares of S_i on ln ln i, i = 3..rows
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 3; i <= out.series.terms.size(); ++i) {
    const double x = std::log(std::log(static_cast<double>(i)));
    const double y = std::stod(out.series.partial_sums[i - 1]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    const double det = n * sxx - sx * sx;
    out.growth_slope = (n * sxy - sx * sy) / det;
    out.growth_intercept = (sy * sxx - sx * sxy) / det;
  }
  out.samples = n;
  return out;
}

std::vector<u64> p1_residual(const PrimeTable& table, u64 bound) {
  static constexpr u64 kSpan = 12;  // widest cluster offset
  if (bound + kSpan > table.bound())
    raise(ErrorCode::OutOfRange,
          "cluster membership probes up to bound + 12; table too small");

  static const std::vector<std::vector<u64>> kPatterns = {
      {0, 2}, {0, 2, 6}, {0, 2, 6, 8}, {0, 2, 6, 8, 12}};

  auto in_cluster = [&](u64 p) {
    for (const auto& pat : kPatterns) {
      for (u64 pos : pat) {
        if (p <= pos + 5) continue;  // start must stay above 5
        const u64 start = p - pos;
        bool all = true;
        for (u64 u : pat)
          if (!table.is_prime(start + u)) {
            all = false;
            break;
          }
        if (all) return true;
      }
    }
    return false;
  };

  std::vector<u64> out;
  for (u64 p = 2; p <= bound; ++p) {
    if (!table.is_prime(p)) continue;
    if (!is_extended_composite(table, table.prime_count(p))) continue;
    if (!in_cluster(p)) out.push_back(p);
  }
  return out;
}

}  // namespace eratray
