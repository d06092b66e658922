#include "eratray/coagulates.hpp"

#include "eratray/rays.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <set>

namespace eratray {

CoagulatePattern::CoagulatePattern(std::vector<u64> offsets, std::string name,
                                   bool allow_inadmissible)
    : offsets_(std::move(offsets)), name_(std::move(name)) {
  if (offsets_.empty())
    raise(ErrorCode::InvalidPattern, "pattern needs at least one offset");
  u64 prev = 0;
  for (u64 u : offsets_) {
    if (u == 0 || u % 2 != 0)
      raise(ErrorCode::InvalidPattern, "offsets must be positive and even");
    if (u <= prev)
      raise(ErrorCode::InvalidPattern, "offsets must be strictly increasing");
    prev = u;
  }
  if (!allow_inadmissible) {
    // Residue obstruction mod 3: if {0} + offsets covers every class, any
    // start > 3 hits a multiple of 3.
    bool hit[3] = {true, false, false};
    for (u64 u : offsets_) hit[u % 3] = true;
    if (hit[0] && hit[1] && hit[2])
      raise(ErrorCode::InvalidPattern,
            "pattern covers all residues mod 3; no prime starts above 5 "
            "(pass allow_inadmissible to scan anyway)");
  }
}

CoagulatePattern CoagulatePattern::named(const std::string& name) {
  if (name == "T1") return CoagulatePattern({2}, "T1");
  if (name == "T2") return CoagulatePattern({2, 6}, "T2");
  if (name == "T3") return CoagulatePattern({2, 6, 8}, "T3");
  if (name == "T4") return CoagulatePattern({2, 6, 8, 12}, "T4");
  if (name == "T2b") return CoagulatePattern({4, 6}, "T2b");
  if (name == "T2c") return CoagulatePattern({2, 8}, "T2c");
  if (name == "T3b") return CoagulatePattern({4, 6, 10}, "T3b");
  if (name == "T3c") return CoagulatePattern({2, 8, 12}, "T3c");
  raise(ErrorCode::InvalidPattern, "unknown pattern name: " + name);
}

std::vector<Coagulate> scan_pattern(const PrimeTable& table,
                                    const CoagulatePattern& pattern,
                                    u64 bound, unsigned threads) {
  if (bound > table.bound())
    raise(ErrorCode::OutOfRange, "scan bound beyond table");
  const u64 span = pattern.offsets().back();
  if (bound < 7 + span) return {};

  auto scan = [&](u64 lo, u64 hi) {
    std::vector<Coagulate> out;
    for (u64 p = lo | 1; p <= hi; p += 2) {
      if (!table.is_prime(p)) continue;
      bool all = true;
      for (u64 u : pattern.offsets())
        if (!table.is_prime(p + u)) {
          all = false;
          break;
        }
      if (!all) continue;
      Coagulate c;
      c.start = p;
      c.elements.push_back(p);
      for (u64 u : pattern.offsets()) c.elements.push_back(p + u);
      out.push_back(std::move(c));
    }
    return out;
  };

  const u64 last_start = bound - span;
  const unsigned nthreads = std::max(1u, threads);
  if (nthreads == 1 || last_start < 10000) return scan(7, last_start);

  std::vector<std::future<std::vector<Coagulate>>> jobs;
  const u64 chunk = (last_start - 7) / nthreads + 1;
  for (unsigned t = 0; t < nthreads; ++t) {
    const u64 lo = 7 + t * chunk;
    if (lo > last_start) break;
    const u64 hi = std::min(last_start, lo + chunk - 1);
    jobs.push_back(std::async(std::launch::async, scan, lo, hi));
  }
  std::vector<Coagulate> out;
  for (auto& j : jobs) {
    auto part = j.get();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

TwinRecord classify_twin(const PrimeTable& table, u64 p) {
  if (p <= 5 || !table.is_prime(p) || p + 2 > table.bound() ||
      !table.is_prime(p + 2))
    raise(ErrorCode::NotTwin,
          "(" + std::to_string(p) + ", " + std::to_string(p + 2) +
              ") is not a twin pair above 5");
  TwinRecord rec;
  rec.start = p;
  rec.origin_low = is_extended_composite(table, table.prime_count(p));
  rec.origin_high = is_extended_composite(table, table.prime_count(p + 2));
  rec.twin_class = (rec.origin_low && rec.origin_high) ? TwinClass::U
                                                       : TwinClass::B;
  return rec;
}

u64 origin_profile(const PrimeTable& table, const Coagulate& c) {
  u64 count = 0;
  for (u64 e : c.elements)
    if (is_extended_composite(table, table.prime_count(e))) ++count;
  return count;
}

bool Rational::less_than(const Rational& o) const {
  return static_cast<unsigned __int128>(num) * o.den <
         static_cast<unsigned __int128>(o.num) * den;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

Rational reduced(u64 num, u64 den) {
  const u64 g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

u64 factor_measure(const PrimeTable& table, u64 n, CdcPolicy policy) {
  return policy == CdcPolicy::FactorsWithMultiplicity
             ? omega(table, n)
             : divisor_count_except_unit(table, n);
}

}  // namespace

Rational cdc(const PrimeTable& table, u64 l, u64 s, CdcPolicy policy) {
  if (l < 13 || s < 3)
    raise(ErrorCode::InvalidDomain, "cdc domain is l >= 13, s >= 3");
  if (l > table.bound()) raise(ErrorCode::OutOfRange, "l beyond table");
  u64 sum = 0;
  for (u64 i = 0; i < s; ++i) sum += factor_measure(table, l - i, policy);
  return reduced(sum, s + 2);
}

CdcScanResult min_cdc_scan(const PrimeTable& table, u64 l_max, u64 s_max,
                           CdcPolicy policy) {
  if (l_max < 13 || s_max < 3)
    raise(ErrorCode::InvalidDomain, "scan domain is l_max >= 13, s_max >= 3");
  if (l_max > table.bound()) raise(ErrorCode::OutOfRange, "l_max beyond table");

  // Prefix sums of the factor measure make each window O(1).
  std::vector<u64> prefix(l_max + 1, 0);
  for (u64 n = 2; n <= l_max; ++n)
    prefix[n] = prefix[n - 1] + factor_measure(table, n, policy);

  CdcScanResult result;
  bool first = true;
  for (u64 l = 13; l <= l_max; ++l) {
    for (u64 s = 3; s <= s_max && s + 1 <= l; ++s) {
      const u64 sum = prefix[l] - prefix[l - s];
      const Rational d = reduced(sum, s + 2);
      if (first || d.less_than(result.minimum)) {
        result.minimum = d;
        result.argmin.clear();
        result.argmin.emplace_back(l, s);
        first = false;
      } else if (d == result.minimum) {
        result.argmin.emplace_back(l, s);
      }
    }
  }
  return result;
}

std::vector<SigmaRecord> scan_strongly_related(const PrimeTable& table,
                                               u64 bound, CdcPolicy policy) {
  if (bound > table.bound())
    raise(ErrorCode::OutOfRange, "scan bound beyond table");
  std::vector<SigmaRecord> out;
  for (u64 p = 7; p + 2 <= bound; p += 2) {
    if (!table.is_prime(p) || !table.is_prime(p + 2)) continue;
    if (!(cdc(table, p + 2, 3, policy) == Rational{1, 1})) continue;
    SigmaRecord rec;
    rec.p = p;
    rec.sigma = (p + 1) / 6;
    rec.last_digit = static_cast<unsigned>(rec.sigma % 10);
    rec.exception = rec.last_digit != 3 && rec.last_digit != 7;
    out.push_back(rec);
  }
  return out;
}

SigmaDigitReport sigma_digit_report(const std::vector<SigmaRecord>& records) {
  SigmaDigitReport report;
  for (const SigmaRecord& r : records) {
    ++report.digit_counts[r.last_digit];
    (r.exception ? report.exceptions : report.conforming).push_back(r);
  }
  return report;
}

}  // namespace eratray
