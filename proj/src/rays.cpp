#include "eratray/rays.hpp"

#include <cassert>
#include <cmath>

namespace eratray {

bool is_extended_composite(const PrimeTable& table, u64 n) {
  if (n < 1) raise(ErrorCode::OutOfRange, "extended composites start at 1");
  if (n == 1) return true;
  return !table.is_prime(n);
}

std::vector<u64> extended_composites(const PrimeTable& table, u64 count) {
  std::vector<u64> out;
  out.reserve(count);
  for (u64 n = 1; out.size() < count; ++n) {
    if (n > table.bound())
      raise(ErrorCode::OutOfRange,
            "table bound too small to enumerate " + std::to_string(count) +
                " extended composites");
    if (is_extended_composite(table, n)) out.push_back(n);
  }
  return out;
}

Ray extend_ray(const PrimeTable& table, u64 base, RayLimit limit,
               bool allow_prime_base) {
  if (base < 1 || base > table.bound())
    raise(ErrorCode::OutOfRange, "ray base outside table range");
  if (!is_extended_composite(table, base) && !allow_prime_base)
    raise(ErrorCode::NotPrincipalBase,
          "base " + std::to_string(base) +
              " is prime; its ray duplicates a principal ray suffix");

  Ray ray;
  ray.base = base;
  u64 current = base;
  while (true) {
    if (limit.kind == RayLimit::Kind::Depth &&
        ray.elements.size() >= limit.value) {
      ray.truncation = TruncationReason::DepthReached;
      break;
    }
    if (current > table.prime_total()) {
      // next iterate lies beyond the table
      ray.truncation = TruncationReason::BoundReached;
      break;
    }
    const u64 next = table.nth_prime(current);
    if (limit.kind == RayLimit::Kind::ValueBound && next > limit.value) {
      ray.truncation = TruncationReason::BoundReached;
      break;
    }
    ray.elements.push_back(next);
    current = next;
  }
  return ray;
}

RayCoordinate locate(const PrimeTable& table, u64 p) {
  if (p > table.bound()) raise(ErrorCode::OutOfRange, "prime beyond table");
  if (!table.is_prime(p))
    raise(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  u64 value = p;
  u64 steps = 0;
  while (!is_extended_composite(table, value)) {
    const u64 next = table.prime_count(value);
    assert(next < value);  // descent is strict, guarantees termination
    value = next;
    ++steps;
  }
  return RayCoordinate{value, steps};
}

RayRelation verify_ray_relation(const PrimeTable& table, u64 base_a,
                                u64 base_b, u64 depth) {
  if (!(base_a < base_b))
    raise(ErrorCode::InvalidArgument, "expects base_a < base_b");
  const Ray a = extend_ray(table, base_a, RayLimit::depth(depth), true);
  const Ray b = extend_ray(table, base_b, RayLimit::depth(depth), true);

  RayRelation rel{};
  for (std::size_t k = 0; k < a.elements.size(); ++k) {
    if (a.elements[k] == base_b) {
      rel.kind = RayRelation::Kind::Contained;
      rel.containment_offset = k + 1;
      return rel;
    }
  }
  rel.kind = RayRelation::Kind::Disjoint;
  rel.compared_indices = std::min(a.elements.size(), b.elements.size());
  rel.termwise_less = true;
  for (std::size_t k = 0; k < rel.compared_indices; ++k)
    if (!(a.elements[k] < b.elements[k])) rel.termwise_less = false;
  return rel;
}

RayClass classify_base(const PrimeTable& table, u64 base) {
  if (!is_extended_composite(table, base))
    raise(ErrorCode::NotPrincipalBase, "classification is over ray bases");
  if (base == 1) return RayClass{RayClass::Kind::K1, 0, 0, 0};

  // pure prime power p^j
  for (u64 p = 2; p * p <= base; ++p) {
    if (!table.is_prime(p)) continue;
    if (base % p != 0) continue;
    u64 rest = base;
    u64 j = 0;
    while (rest % p == 0) {
      rest /= p;
      ++j;
    }
    if (rest == 1) return RayClass{RayClass::Kind::Kp, p, 0, j};
    // semiprime alpha * p with alpha <= p: the cofactor must be a larger prime
    if (j == 1 && table.is_prime(rest) && p <= rest)
      return RayClass{RayClass::Kind::Kp, rest, p, 1};
    break;  // smallest prime factor settles both patterns
  }
  return RayClass{RayClass::Kind::Unclassified, 0, 0, 0};
}

GapReport check_gap_bound(const Ray& ray) {
  if (ray.elements.size() < 2)
    raise(ErrorCode::InvalidArgument, "gap check needs at least 2 elements");
  GapReport report;
  for (std::size_t k = 0; k + 1 < ray.elements.size(); ++k) {
    GapCheck c;
    c.index = k + 1;
    c.left = ray.elements[k];
    c.right = ray.elements[k + 1];
    const double lhs = static_cast<double>(c.right - c.left);
    c.threshold =
        static_cast<double>(c.left) * (std::log(static_cast<double>(c.left)) - 1.0);
    c.vacuous = c.threshold <= 0.0;
    c.pass = lhs > c.threshold;
    if (!c.pass) report.all_pass = false;
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace eratray
