#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eratray/prime_table.hpp"

namespace eratray {

// Extended composites: {1} plus the composite numbers. These are the bases
// of the principal rays and the first column of the ray matrix.
bool is_extended_composite(const PrimeTable& table, u64 n);

// First `count` extended composites in ascending order (1, 4, 6, 8, ...).
std::vector<u64> extended_composites(const PrimeTable& table, u64 count);

enum class TruncationReason { DepthReached, BoundReached };

struct RayLimit {
  enum class Kind { Depth, ValueBound } kind;
  u64 value;

  static RayLimit depth(u64 d) { return {Kind::Depth, d}; }
  static RayLimit value_bound(u64 v) { return {Kind::ValueBound, v}; }
};

// One ray: the iterates p1 = nth_prime(base), p_{k+1} = nth_prime(p_k).
// Strictly increasing, all prime. The base itself is not an element.
struct Ray {
  u64 base = 0;
  std::vector<u64> elements;
  TruncationReason truncation = TruncationReason::DepthReached;

  bool operator==(const Ray&) const = default;
};

// Extends the ray from `base` until the limit or the table runs out
// (truncation recorded, never an error). Prime bases duplicate a deeper
// suffix of some principal ray and are refused unless `allow_prime_base`
// is set for verification runs.
Ray extend_ray(const PrimeTable& table, u64 base, RayLimit limit,
               bool allow_prime_base = false);

// Address of a prime inside the principal-ray partition.
struct RayCoordinate {
  u64 base = 0;   // extended composite the descent lands on
  u64 index = 0;  // 1-based position within the ray

  bool operator==(const RayCoordinate&) const = default;
};

// Walks p -> prime_count(p) until the value leaves the primes; each step
// strictly decreases, so this terminates. Round-trips with extend_ray.
RayCoordinate locate(const PrimeTable& table, u64 p);

// Lemma-style relation between two rays: either the larger base appears
// inside the smaller base's ray (containment, with the offset at which it
// appears) or the rays are disjoint and termwise ordered.
struct RayRelation {
  enum class Kind { Contained, Disjoint } kind;
  u64 containment_offset = 0;     // k* with ray(a).elements[k*-1] == b
  u64 compared_indices = 0;       // indices checked for termwise order
  bool termwise_less = false;     // p_k(a) < p_k(b) for all compared k
};

RayRelation verify_ray_relation(const PrimeTable& table, u64 base_a,
                                u64 base_b, u64 depth);

// Ray-class membership per the power/semiprime patterns: K1 = {1};
// K_p covers bases p^j (j >= 2) and alpha*p with alpha <= p both prime.
// Anything else is reported as Unclassified rather than guessed.
struct RayClass {
  enum class Kind { K1, Kp, Unclassified } kind;
  u64 p = 0;         // class label for Kp
  u64 alpha = 0;     // alpha for semiprime bases, 0 for pure powers
  u64 exponent = 0;  // j for pure powers, 1 for semiprimes
};

RayClass classify_base(const PrimeTable& table, u64 base);

// Adjacent-gap lower bound p_{k+1} - p_k > p_k (ln p_k - 1), checked per
// index. The first ray's leading element 2 makes the bound negative; that
// case is flagged vacuous and reported separately.
struct GapCheck {
  u64 index = 0;  // k, 1-based position of the left element
  u64 left = 0;
  u64 right = 0;
  double threshold = 0.0;
  bool pass = false;
  bool vacuous = false;  // threshold <= 0 (the excluded leading-2 case)
};

struct GapReport {
  std::vector<GapCheck> checks;
  bool all_pass = true;
};

GapReport check_gap_bound(const Ray& ray);

}  // namespace eratray
