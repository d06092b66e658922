#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eratray/error.hpp"

namespace eratray {

using u64 = std::uint64_t;

struct SieveOptions {
  // Working-set size per sieve segment; the default targets L2 residency.
  std::size_t segment_bytes = 256 * 1024;
  // Refuse to allocate a primality store larger than this.
  u64 memory_cap_bytes = u64{4} << 30;
};

// Immutable prime store over [2, bound].
//
// Storage is an odd-only bitmap (bit i <=> 2i+1, set <=> prime) plus
// cumulative set-bit counts per block of words, which makes both rank
// (prime_count) and select (nth_prime) cheap: a binary search over blocks
// followed by at most one block of popcounts. Construction sieves segment
// by segment; after construction the table is immutable and safe for
// unrestricted concurrent reads.
class PrimeTable {
 public:
  // Largest supported bound; the memory cap usually binds first
  // (the bitmap costs bound/16 bytes).
  static constexpr u64 kBoundCeiling = u64{1} << 40;

  static PrimeTable build(u64 bound, const SieveOptions& options = {});

  u64 bound() const noexcept { return bound_; }
  u64 prime_total() const noexcept { return prime_total_; }

  bool is_prime(u64 n) const;       // n <= bound
  u64 prime_count(u64 x) const;     // pi(x), x <= bound
  u64 nth_prime(u64 n) const;       // pi^-1(n), 1-indexed

  // Largest n with nth_prime(n) computable, i.e. prime_total().
  // Estimate of the bound needed to hold the nth prime, used for
  // actionable OutOfRange messages.
  static u64 required_bound_estimate(u64 n);

  // Binary cache (see docs/formats in README): magic "E2NSIEVE", u32 LE
  // version, u64 LE bound, odd bitmap LSB-first, u64 FNV-1a checksum.
  void save_cache(const std::string& path) const;
  static PrimeTable load_cache(const std::string& path);

  // Direct bitmap access for serialization and tests.
  const std::vector<u64>& words() const noexcept { return words_; }

 private:
  PrimeTable() = default;
  void finalize_counts();

  u64 bound_ = 0;
  u64 prime_total_ = 0;
  std::vector<u64> words_;  // odd bitmap, bit i <=> 2i+1
  std::vector<u64> cum_;    // set bits in words [0, kWordsPerBlock*b)

  static constexpr std::size_t kWordsPerBlock = 8;
};

// Number of prime factors of n counted with multiplicity (Omega).
// omega(1) == 0 by convention; omega(p) == 1 iff p prime.
// Requires table.bound() >= sqrt(n).
u64 omega(const PrimeTable& table, u64 n);

// Number of divisors of n excluding 1 (tau(n) - 1); the literal reading
// of the windowed divisibility coefficient, kept selectable for
// comparison runs.
u64 divisor_count_except_unit(const PrimeTable& table, u64 n);

// Inclusion-exclusion prime count (Legendre): pi(x) computed from
// squarefree products (including d = 1) of the primes <= sqrt(x).
// Independent of the bitmap rank path; used as a cross-check oracle.
// Requires table.bound() >= sqrt(x). `cap` bounds the enumeration cost.
u64 legendre_count(const PrimeTable& table, u64 x, u64 cap = 10'000'000);

}  // namespace eratray
