#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "multinorm/abelian_q.hpp"
#include "multinorm/brauer.hpp"
#include "multinorm/sha_core.hpp"

namespace multinorm {

// Closed forms for products of cyclic extensions: a vanishing criterion per
// prime via a common overfield of degree p^2 and its local degrees, always
// cross-checked against the general covering-group pipeline.

// ---- degree-p subfields of a bicyclic field ------------------------------------

// All degree-p subfields of a field F with Galois group C_p x C_p: the fixed
// fields of the p + 1 order-p subgroups of the quotient, sorted canonically.
inline std::vector<AbelianFieldQ> degree_p_subfields(const AbelianFieldQ& F,
                                                     int64_t p,
                                                     const Limits& limits = {}) {
  if (!is_prime64(p)) fail(ErrorCode::NotPrimeDegree, "p must be prime");
  if (F.degree() != p * p)
    fail(ErrorCode::WrongShape, "overfield degree must be p^2");
  int64_t N = F.conductor();
  std::set<int64_t> H(F.subgroup_elements().begin(),
                      F.subgroup_elements().end());
  std::set<std::set<int64_t>> seen;
  std::vector<AbelianFieldQ> out;
  for (int64_t u = 1; u < N; ++u) {
    if (std::gcd(u, N) != 1 || H.count(u)) continue;
    if (!H.count(powmod(u, p, N))) continue;  // need order p modulo H
    // Subgroup generated by H and u.
    std::set<int64_t> sub = H;
    int64_t pw = u;
    for (int64_t j = 1; j < p; ++j) {
      for (int64_t h : H) sub.insert(mulmod(h, pw, N));
      pw = mulmod(pw, u, N);
    }
    if (!seen.insert(sub).second) continue;
    out.push_back(AbelianFieldQ::from_subgroup_elements(N, sub, limits));
  }
  if (out.size() != static_cast<size_t>(p + 1))
    fail(ErrorCode::WrongShape, "Galois group is not elementary bicyclic");
  std::sort(out.begin(), out.end(),
            [](const AbelianFieldQ& a, const AbelianFieldQ& b) {
              return a.sort_key() < b.sort_key();
            });
  return out;
}

// ---- the prime-degree criterion -------------------------------------------------

struct PrimeCaseReport {
  int64_t p = 0;
  std::vector<AbelianFieldQ> factors;      // deduplicated, input order
  bool nonzero = false;
  std::optional<AbelianFieldQ> overfield;  // common degree-p^2 field, when found
  int64_t rank = 0;                        // group is (Z/p)^rank
  // Certificate: local degrees of the overfield at its ramified places and at
  // the real place (unramified places have cyclic decomposition groups, hence
  // local degree <= p automatically).
  std::vector<std::pair<Place, int64_t>> local_degrees;

  std::vector<int64_t> invariant_factors() const {
    return std::vector<int64_t>(static_cast<size_t>(rank), p);
  }
};

// Vanishing criterion for a product of distinct degree-p fields: the group is
// nonzero exactly when all factors are subfields of one degree-p^2 field F
// whose local degrees are <= p everywhere, in which case it is (Z/p)^(n-2).
// Duplicates are removed first; n <= 2 and n >= p + 2 give zero outright.
inline PrimeCaseReport sha_prime_case(const std::vector<AbelianFieldQ>& factors,
                                      const Limits& limits = {}) {
  if (factors.empty())
    fail(ErrorCode::ZeroInput, "sha_prime_case needs at least one factor");
  int64_t p = factors[0].degree();
  if (!is_prime64(p))
    fail(ErrorCode::NotPrimeDegree, "factors must have prime degree");
  PrimeCaseReport rep;
  rep.p = p;
  for (const auto& K : factors) {
    if (K.degree() != p)
      fail(ErrorCode::NotPrimeDegree, "factors must share one prime degree");
    bool dup = false;
    for (const auto& seen : rep.factors) dup = dup || seen.same_field(K);
    if (!dup) rep.factors.push_back(K);
  }
  int64_t n = static_cast<int64_t>(rep.factors.size());
  if (n <= 2 || n >= p + 2) return rep;

  // A common degree-p^2 overfield, if one exists, is the compositum of any
  // two distinct factors.
  AbelianFieldQ F = rep.factors[0].compositum(rep.factors[1], limits);
  for (const auto& K : rep.factors)
    if (!K.is_subfield_of(F)) return rep;
  rep.overfield = F;
  bool small = true;
  std::vector<Place> ramified = {Place::infinity()};
  for (auto [q, b] : factorize64(F.conductor())) {
    (void)b;
    ramified.push_back(Place::at(q));
  }
  for (const Place& v : ramified) {
    int64_t d = F.local_degree(v);
    rep.local_degrees.emplace_back(v, d);
    small = small && d <= p;
  }
  if (!small) return rep;
  rep.nonzero = true;
  rep.rank = n - 2;
  return rep;
}

// ---- full products of cyclic extensions ----------------------------------------

struct CyclicProductReport {
  std::vector<PrimeCaseReport> prime_cases;  // ascending p over the primes of
                                             // the degree product
  std::vector<int64_t> nonzero_primes;       // primes whose case is nonzero
  ShaGroup group;                            // independent general pipeline
  bool vanishes = true;                      // closed-form verdict
};

// Closed-form vanishing test for a product of cyclic extensions: per prime p
// of the degree product, the degree-p subfields of the p-power parts decide
// everything.  The general pipeline runs alongside and the two verdicts are
// required to agree.
inline CyclicProductReport sha_product_cyclic(
    const std::vector<AbelianFieldQ>& L, const Limits& limits = {}) {
  if (L.empty()) fail(ErrorCode::ZeroInput, "empty product");
  for (const auto& K : L)
    if (!K.is_quotient_cyclic())
      fail(ErrorCode::NonCyclic, "factor with non-cyclic Galois group");

  CyclicProductReport out;
  std::set<int64_t> ps;
  for (const auto& K : L)
    for (auto [p, e] : factorize64(K.degree())) {
      (void)e;
      ps.insert(p);
    }
  for (int64_t p : ps) {
    std::vector<AbelianFieldQ> prim;
    for (const auto& K : L) {
      AbelianFieldQ Kp = K.p_part_subfield(p, limits);
      if (Kp.degree() > 1) prim.push_back(Kp.subfield_of_degree(p, limits));
    }
    PrimeCaseReport pc = sha_prime_case(prim, limits);
    if (pc.nonzero) {
      out.nonzero_primes.push_back(p);
      out.vanishes = false;
    }
    out.prime_cases.push_back(std::move(pc));
  }
  out.group = compute_sha(L, 0, limits);
  if (out.group.trivial() != out.vanishes)
    fail(ErrorCode::Internal,
         "closed form and general pipeline disagree on vanishing");
  return out;
}

// ---- the explicit character map on a bicyclic overfield -------------------------

struct ExampleMapReport {
  int64_t p = 0;
  bool vacuous = false;          // some local degree of F exceeds p; the group
                                 // is trivial and the map carries no content
  std::vector<int64_t> values;   // p - 1 components in Z/p (empty if vacuous)

  bool zero() const {
    for (int64_t v : values)
      if (v != 0) return false;
    return true;
  }
};

// The explicit obstruction map for the product of all p + 1 degree-p
// subfields K_1, ..., K_{p+1} of a bicyclic field F: with K = K_{p+1},
// component i (for i = 1, ..., p-1) is the sum over the places where K_i
// splits completely of the Z/p-valued local invariant of (K, c).  When all
// local degrees of F are <= p this induces an isomorphism from the norm
// cokernel onto (Z/p)^(p-1); in particular c is a global multinorm exactly
// when the vector vanishes.
inline ExampleMapReport example_map_f(const AbelianFieldQ& F,
                                      const std::vector<AbelianFieldQ>& subfields,
                                      const Rational& c,
                                      const Limits& limits = {}) {
  (void)limits;
  if (c == 0) fail(ErrorCode::ZeroInput, "map of 0");
  if (subfields.size() < 3)
    fail(ErrorCode::WrongShape, "need p + 1 subfields with p prime");
  int64_t p = static_cast<int64_t>(subfields.size()) - 1;
  if (!is_prime64(p))
    fail(ErrorCode::WrongShape, "subfield count must be p + 1 with p prime");
  if (F.degree() != p * p)
    fail(ErrorCode::WrongShape, "overfield degree must be p^2");
  for (size_t i = 0; i < subfields.size(); ++i) {
    if (subfields[i].degree() != p)
      fail(ErrorCode::WrongShape, "subfields must have degree p");
    if (!subfields[i].is_subfield_of(F))
      fail(ErrorCode::WrongShape, "not a subfield of the overfield");
    for (size_t j = 0; j < i; ++j)
      if (subfields[i].same_field(subfields[j]))
        fail(ErrorCode::WrongShape, "duplicate subfield");
  }

  ExampleMapReport rep;
  rep.p = p;
  std::vector<Place> ramified = {Place::infinity()};
  for (auto [q, b] : factorize64(F.conductor())) {
    (void)b;
    ramified.push_back(Place::at(q));
  }
  for (const Place& v : ramified)
    if (F.local_degree(v) > p) {
      rep.vacuous = true;
      return rep;
    }

  const AbelianFieldQ& K = subfields.back();
  for (size_t i = 0; i + 2 < subfields.size(); ++i) {
    int64_t sum = 0;
    for (const Place& v : invariant_support(K, c)) {
      if (subfields[i].local_degree(v) != 1) continue;  // v not split in K_i
      QmodZ inv = hasse_invariant(K, c, v);
      if (inv.is_zero()) continue;
      sum = mod_reduce(sum + inv.num() * (p / inv.den()), p);
    }
    rep.values.push_back(sum);
  }
  return rep;
}

}  // namespace multinorm
