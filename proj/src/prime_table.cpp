#include "eratray/prime_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace eratray {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidBound: return "InvalidBound";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::NotPrincipalBase: return "NotPrincipalBase";
    case ErrorCode::NotTwin: return "NotTwin";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::InvalidFormat: return "InvalidFormat";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

namespace {

constexpr u64 kOne = 1;

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Plain odd sieve for the base primes up to `limit` (small: sqrt of bound).
std::vector<u64> small_odd_primes(u64 limit) {
  std::vector<u64> primes;
  if (limit < 3) return primes;
  std::vector<std::uint8_t> comp((limit + 1) / 2, 0);  // index i <=> 2i+1
  for (u64 p = 3; p * p <= limit; p += 2) {
    if (comp[p / 2]) continue;
    for (u64 m = p * p; m <= limit; m += 2 * p) comp[m / 2] = 1;
  }
  for (u64 i = 1; 2 * i + 1 <= limit; ++i) {
    if (!comp[i]) primes.push_back(2 * i + 1);
  }
  return primes;
}

}  // namespace

PrimeTable PrimeTable::build(u64 bound, const SieveOptions& options) {
  if (bound < 2) raise(ErrorCode::InvalidBound, "sieve bound must be >= 2");
  if (bound > kBoundCeiling)
    raise(ErrorCode::InvalidBound,
          "bound exceeds the supported ceiling 2^40");

  const u64 odd_count = (bound + 1) / 2;  // odds in [1, bound]
  const u64 word_count = (odd_count + 63) / 64;
  const u64 block_count = (word_count + kWordsPerBlock - 1) / kWordsPerBlock;
  const u64 estimate = word_count * 8 + (block_count + 1) * 8;
  if (estimate > options.memory_cap_bytes)
    raise(ErrorCode::ResourceLimit,
          "sieve of bound " + std::to_string(bound) + " needs about " +
              std::to_string(estimate) + " bytes, above the configured cap");

  PrimeTable t;
  t.bound_ = bound;
  t.words_.assign(word_count, ~u64{0});

  const std::vector<u64> base = small_odd_primes(isqrt(bound));

  const u64 seg_words = std::max<u64>(options.segment_bytes / 8, 1);
  for (u64 w0 = 0; w0 < word_count; w0 += seg_words) {
    const u64 w1 = std::min(w0 + seg_words, word_count);
    const u64 lo = 2 * (64 * w0) + 1;        // first odd value in segment
    const u64 hi = 2 * (64 * w1 - 1) + 1;    // last odd value in segment
    for (u64 p : base) {
      u64 start = p * p;
      if (start > hi) break;
      if (start < lo) {
        u64 m = (lo + p - 1) / p;
        if ((m & 1) == 0) ++m;               // odd multiples only
        start = m * p;
      }
      for (u64 v = start; v <= hi; v += 2 * p) {
        const u64 idx = (v - 1) / 2;
        t.words_[idx / 64] &= ~(kOne << (idx % 64));
      }
    }
  }

  // 1 is not prime; odds above bound are padding.
  t.words_[0] &= ~kOne;
  const u64 tail = odd_count % 64;
  if (tail != 0) t.words_.back() &= (kOne << tail) - 1;

  t.finalize_counts();
  return t;
}

void PrimeTable::finalize_counts() {
  const u64 block_count =
      (words_.size() + kWordsPerBlock - 1) / kWordsPerBlock;
  cum_.assign(block_count + 1, 0);
  u64 running = 0;
  for (u64 b = 0; b < block_count; ++b) {
    cum_[b] = running;
    const u64 end = std::min<u64>((b + 1) * kWordsPerBlock, words_.size());
    for (u64 w = b * kWordsPerBlock; w < end; ++w)
      running += std::popcount(words_[w]);
  }
  cum_[block_count] = running;
  prime_total_ = running + 1;  // +1 for the prime 2
}

bool PrimeTable::is_prime(u64 n) const {
  if (n > bound_)
    raise(ErrorCode::OutOfRange,
          std::to_string(n) + " exceeds table bound " + std::to_string(bound_));
  if (n == 2) return true;
  if (n < 2 || n % 2 == 0) return false;
  const u64 idx = (n - 1) / 2;
  return (words_[idx / 64] >> (idx % 64)) & kOne;
}

u64 PrimeTable::prime_count(u64 x) const {
  if (x > bound_)
    raise(ErrorCode::OutOfRange,
          "pi(" + std::to_string(x) + ") exceeds table bound " +
              std::to_string(bound_));
  if (x < 2) return 0;
  const u64 idx = (x - 1) / 2;  // last odd <= x
  const u64 word = idx / 64;
  const u64 block = word / kWordsPerBlock;
  u64 count = cum_[block];
  for (u64 w = block * kWordsPerBlock; w < word; ++w)
    count += std::popcount(words_[w]);
  const u64 keep = idx % 64;
  const u64 mask = (keep == 63) ? ~u64{0} : ((kOne << (keep + 1)) - 1);
  count += std::popcount(words_[word] & mask);
  return count + 1;  // the prime 2
}

u64 PrimeTable::nth_prime(u64 n) const {
  if (n == 0) raise(ErrorCode::OutOfRange, "prime indices start at 1");
  if (n > prime_total_)
    raise(ErrorCode::OutOfRange,
          "prime #" + std::to_string(n) + " exceeds table bound " +
              std::to_string(bound_) + "; rebuild with bound >= " +
              std::to_string(required_bound_estimate(n)));
  if (n == 1) return 2;
  const u64 target = n - 1;  // rank among odd primes

  // Largest block with cum_ < target, then popcount forward.
  u64 lo = 0, hi = cum_.size() - 1;
  while (lo + 1 < hi) {
    const u64 mid = (lo + hi) / 2;
    (cum_[mid] < target ? lo : hi) = mid;
  }
  u64 count = cum_[lo];
  for (u64 w = lo * kWordsPerBlock; w < words_.size(); ++w) {
    const u64 pc = std::popcount(words_[w]);
    if (count + pc >= target) {
      u64 word = words_[w];
      for (u64 skip = target - count - 1; skip > 0; --skip)
        word &= word - 1;
      const u64 bit = std::countr_zero(word);
      return 2 * (64 * w + bit) + 1;
    }
    count += pc;
  }
  raise(ErrorCode::OutOfRange, "corrupt cumulative counts");
}

u64 PrimeTable::required_bound_estimate(u64 n) {
  static constexpr u64 kSmall[] = {0, 2, 3, 5, 7, 11, 13};
  if (n <= 6) return kSmall[n];
  const double ln = std::log(static_cast<double>(n));
  const double lnln = std::log(ln);
  return static_cast<u64>(static_cast<double>(n) * (ln + lnln)) + 1;
}

// --- cache ---------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'E', '2', 'N', 'S', 'I', 'E', 'V', 'E'};
constexpr std::uint32_t kCacheVersion = 1;

u64 fnv1a(u64 h, const unsigned char* data, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr u64 kFnvOffset = 0xcbf29ce484222325ULL;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

}  // namespace

void PrimeTable::save_cache(const std::string& path) const {
  std::string head;
  head.append(kMagic, 8);
  put_u32(head, kCacheVersion);
  put_u64(head, bound_);

  const u64 odd_count = (bound_ + 1) / 2;
  const u64 byte_count = (odd_count + 7) / 8;
  std::string payload(byte_count, '\0');
  for (u64 k = 0; k < byte_count; ++k)
    payload[k] = char((words_[k / 8] >> (8 * (k % 8))) & 0xFF);

  u64 sum = fnv1a(kFnvOffset,
                  reinterpret_cast<const unsigned char*>(head.data() + 8),
                  head.size() - 8);
  sum = fnv1a(sum, reinterpret_cast<const unsigned char*>(payload.data()),
              payload.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoFailure, "cannot open " + path + " for write");
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  std::string trailer;
  put_u64(trailer, sum);
  out.write(trailer.data(), 8);
  if (!out) raise(ErrorCode::IoFailure, "short write to " + path);
}

PrimeTable PrimeTable::load_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoFailure, "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (content.size() < 8 + 4 + 8 + 8)
    raise(ErrorCode::ChecksumMismatch, "cache file truncated: " + path);
  if (std::memcmp(content.data(), kMagic, 8) != 0)
    raise(ErrorCode::VersionMismatch, "bad cache magic in " + path);
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i)
    version |= std::uint32_t(static_cast<unsigned char>(content[8 + i]))
               << (8 * i);
  if (version != kCacheVersion)
    raise(ErrorCode::VersionMismatch,
          "cache version " + std::to_string(version) + " unsupported");
  u64 bound = 0;
  for (int i = 0; i < 8; ++i)
    bound |= u64(static_cast<unsigned char>(content[12 + i])) << (8 * i);
  if (bound < 2 || bound > kBoundCeiling)
    raise(ErrorCode::ChecksumMismatch, "implausible cache bound");

  const u64 odd_count = (bound + 1) / 2;
  const u64 byte_count = (odd_count + 7) / 8;
  if (content.size() != 8 + 4 + 8 + byte_count + 8)
    raise(ErrorCode::ChecksumMismatch, "cache size mismatch: " + path);

  u64 expect = 0;
  for (int i = 0; i < 8; ++i)
    expect |= u64(static_cast<unsigned char>(content[content.size() - 8 + i]))
              << (8 * i);
  u64 sum = fnv1a(kFnvOffset,
                  reinterpret_cast<const unsigned char*>(content.data() + 8),
                  4 + 8);
  sum = fnv1a(sum,
              reinterpret_cast<const unsigned char*>(content.data() + 20),
              byte_count);
  if (sum != expect)
    raise(ErrorCode::ChecksumMismatch, "cache checksum mismatch: " + path);

  PrimeTable t;
  t.bound_ = bound;
  t.words_.assign((odd_count + 63) / 64, 0);
  for (u64 k = 0; k < byte_count; ++k)
    t.words_[k / 8] |=
        u64(static_cast<unsigned char>(content[20 + k])) << (8 * (k % 8));
  t.finalize_counts();
  return t;
}

// --- factor counting -----------------------------------------------------

u64 omega(const PrimeTable& table, u64 n) {
  if (n <= 1) return 0;
  u64 count = 0;
  u64 rest = n;
  for (u64 i = 1;; ++i) {
    const u64 p = table.nth_prime(i);
    if (p * p > rest) break;
    while (rest % p == 0) {
      rest /= p;
      ++count;
    }
  }
  if (rest > 1) ++count;  // the remaining cofactor is prime
  return count;
}

u64 divisor_count_except_unit(const PrimeTable& table, u64 n) {
  if (n <= 1) return 0;
  u64 tau = 1;
  u64 rest = n;
  for (u64 i = 1;; ++i) {
    const u64 p = table.nth_prime(i);
    if (p * p > rest) break;
    u64 e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    tau *= e + 1;
  }
  if (rest > 1) tau *= 2;
  return tau - 1;
}

// --- Legendre inclusion-exclusion ----------------------------------------

namespace {

// Signed sum of floor(x/d) over squarefree d built from primes[i..),
// with the sign flipping per added factor. Products above x contribute
// floor(x/d) = 0 and are pruned exactly.
std::int64_t legendre_dfs(const std::vector<u64>& primes, std::size_t i,
                          u64 x, u64 d, int sign) {
  std::int64_t acc = sign * static_cast<std::int64_t>(x / d);
  for (std::size_t k = i; k < primes.size(); ++k) {
    if (d > x / primes[k]) break;
    acc += legendre_dfs(primes, k + 1, x, d * primes[k], -sign);
  }
  return acc;
}

}  // namespace

u64 legendre_count(const PrimeTable& table, u64 x, u64 cap) {
  if (x < 4)
    raise(ErrorCode::InvalidDomain, "legendre_count requires x >= 4");
  if (x > cap)
    raise(ErrorCode::ResourceLimit,
          "legendre_count cap is " + std::to_string(cap));
  const u64 root = isqrt(x);
  if (root > table.bound())
    raise(ErrorCode::OutOfRange, "table bound below sqrt(x)");

  std::vector<u64> primes;
  for (u64 p = 2; p <= root; ++p)
    if (table.is_prime(p)) primes.push_back(p);

  const std::int64_t sum = legendre_dfs(primes, 0, x, 1, +1);
  const std::int64_t result =
      static_cast<std::int64_t>(primes.size()) - 1 + sum;
  return static_cast<u64>(result);
}

}  // namespace eratray
