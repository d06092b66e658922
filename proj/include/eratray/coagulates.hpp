#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eratray/prime_table.hpp"

namespace eratray {

// A cluster pattern {p, p+u1, ..., p+ul} with strictly increasing even
// offsets. Patterns whose residues cover a full class mod 2 or 3 admit at
// most finitely many prime starts and are rejected at construction unless
// overridden for research scans.
class CoagulatePattern {
 public:
  CoagulatePattern(std::vector<u64> offsets, std::string name = "",
                   bool allow_inadmissible = false);

  static CoagulatePattern named(const std::string& name);

  const std::vector<u64>& offsets() const noexcept { return offsets_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t span() const noexcept { return offsets_.back(); }
  std::size_t size() const noexcept { return offsets_.size() + 1; }

 private:
  std::vector<u64> offsets_;
  std::string name_;
};

struct Coagulate {
  u64 start = 0;
  std::vector<u64> elements;  // start and start+offsets
};

// All coagulates of the pattern with prime start > 5 and every element
// <= bound (and prime).
std::vector<Coagulate> scan_pattern(const PrimeTable& table,
                                    const CoagulatePattern& pattern,
                                    u64 bound, unsigned threads = 1);

enum class TwinClass { U, B };

// A twin pair with per-element ray-origin membership: an element is an
// origin when its prime index is an extended composite. For p > 5 the two
// indices are consecutive, so at least one flag is always set.
struct TwinRecord {
  u64 start = 0;
  bool origin_low = false;
  bool origin_high = false;
  TwinClass twin_class = TwinClass::B;
};

TwinRecord classify_twin(const PrimeTable& table, u64 p);

// Count of elements whose prime index is an extended composite.
u64 origin_profile(const PrimeTable& table, const Coagulate& c);

// Exact rational for windowed factor-count averages.
struct Rational {
  u64 num = 0;
  u64 den = 1;

  bool operator==(const Rational&) const = default;
  // exact cross-multiplied comparison
  bool less_than(const Rational& o) const;
  std::string str() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class CdcPolicy {
  FactorsWithMultiplicity,   // Omega
  DivisorsExceptUnit,        // tau - 1, the literal reading
};

// Windowed collective divisibility coefficient
// D(l, s) = (d(l-s+1) + ... + d(l)) / (s + 2), domain l >= 13, s >= 3.
Rational cdc(const PrimeTable& table, u64 l, u64 s,
             CdcPolicy policy = CdcPolicy::FactorsWithMultiplicity);

struct CdcScanResult {
  Rational minimum;
  std::vector<std::pair<u64, u64>> argmin;  // (l, s) attaining the minimum
};

CdcScanResult min_cdc_scan(const PrimeTable& table, u64 l_max, u64 s_max,
                           CdcPolicy policy = CdcPolicy::FactorsWithMultiplicity);

// Strongly related twin: (p, p+2) both prime, p > 5, D(p+2, 3) = 1;
// equivalently p + 1 = 6 * sigma with sigma prime.
struct SigmaRecord {
  u64 p = 0;            // lower twin
  u64 sigma = 0;        // (p + 1) / 6
  unsigned last_digit = 0;
  bool exception = false;  // last digit outside {3, 7}
};

std::vector<SigmaRecord> scan_strongly_related(
    const PrimeTable& table, u64 bound,
    CdcPolicy policy = CdcPolicy::FactorsWithMultiplicity);

struct SigmaDigitReport {
  std::vector<SigmaRecord> conforming;  // last digit 3 or 7
  std::vector<SigmaRecord> exceptions;  // anything else
  u64 digit_counts[10] = {};
};

SigmaDigitReport sigma_digit_report(const std::vector<SigmaRecord>& records);

}  // namespace eratray
