#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "multinorm/abelian_q.hpp"
#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"

namespace multinorm {

inline int log_exact(int64_t value, int64_t p) {
  int k = 0;
  while (value % p == 0) { value /= p; ++k; }
  if (value != 1)
    fail(ErrorCode::Internal, "expected a power of " + std::to_string(p));
  return k;
}

// One class of places of Q sharing all local splitting data.
struct PlaceClass {
  enum class Kind { Frob, Prime, Infty };
  Kind kind = Kind::Frob;
  BigInt value;           // Frob: a witness unit residue mod N; Prime: q
  std::vector<int> exps;  // e_{i,v} per factor, in context (sorted) order
  int pivot_exp = 0;      // log_p of the pivot's local degree at the class
};

struct SplittingProfile {
  int64_t p = 0;
  int e = 0;
  std::vector<int> exps;  // e_i, sorted descending
  std::vector<PlaceClass> classes;
};

// Validation of the structural profile invariants (used on imports).
inline void validate_profile(const SplittingProfile& pr) {
  auto bad = [](const std::string& why) {
    fail(ErrorCode::MalformedProfile, why);
  };
  if (pr.p < 2 || !is_prime64(pr.p)) bad("p must be prime");
  if (pr.e < 1) bad("e must be >= 1");
  for (size_t i = 0; i < pr.exps.size(); ++i) {
    if (pr.exps[i] < 0 || pr.exps[i] > pr.e)
      bad("exps[" + std::to_string(i) + "] outside [0, e]");
    if (i > 0 && pr.exps[i] > pr.exps[i - 1])
      bad("exps must be sorted descending");
  }
  bool has_infty = false;
  std::set<BigInt> primes_seen;
  for (size_t c = 0; c < pr.classes.size(); ++c) {
    const auto& cls = pr.classes[c];
    std::string at = "class " + std::to_string(c) + ": ";
    if (cls.exps.size() != pr.exps.size())
      bad(at + "exponent vector length mismatch");
    for (size_t i = 0; i < cls.exps.size(); ++i) {
      if (cls.exps[i] < 0) bad(at + "negative exponent");
      if (cls.exps[i] > pr.exps[i])
        bad(at + "exponent " + std::to_string(cls.exps[i]) +
            " exceeds factor bound " + std::to_string(pr.exps[i]));
    }
    if (cls.pivot_exp < 0 || cls.pivot_exp > pr.e)
      bad(at + "pivot exponent outside [0, e]");
    switch (cls.kind) {
      case PlaceClass::Kind::Frob:
        if (cls.value < 1) bad(at + "frob witness must be >= 1");
        break;
      case PlaceClass::Kind::Prime:
        if (cls.value < 2) bad(at + "prime class value must be >= 2");
        if (!primes_seen.insert(cls.value).second)
          bad(at + "duplicate prime class");
        break;
      case PlaceClass::Kind::Infty:
        if (has_infty) bad(at + "duplicate infinite class");
        has_infty = true;
        break;
    }
  }
}

// The Galois group of the compositum of a list of fields, realized as the
// image of (Z/NZ)^x in the product of the per-field quotients.  Elements are
// labelled tuples of per-field coset indices; per-field cosets are labelled
// lazily (index 0 = identity coset).  A witness residue mod N is kept for
// every element.
class CompositeGalois {
 public:
  CompositeGalois(std::vector<AbelianFieldQ> fields, const Limits& limits = {})
      : fields_(std::move(fields)), limits_(limits) {
    // Merge conductor factorizations; N = lcm of conductors as a BigInt.
    std::map<int64_t, int> merged;
    for (const auto& F : fields_) {
      for (auto [q, b] : factorize64(F.conductor()))
        merged[q] = std::max(merged[q], b);
    }
    modulus_ = 1;
    for (auto [q, b] : merged) {
      modulus_factors_.emplace_back(q, b);
      for (int i = 0; i < b; ++i) modulus_ *= q;
    }
    cosets_.resize(fields_.size());
    for (size_t j = 0; j < fields_.size(); ++j) {
      int id0 = coset_index(j, mod_reduce(1, fields_[j].conductor()));
      if (id0 != 0) fail(ErrorCode::Internal, "identity coset not first");
    }

    // Global unit generators of (Z/NZ)^x.
    std::vector<BigInt> gens;
    for (auto [q, b] : modulus_factors_) {
      int64_t qb = ipow(q, b);
      BigInt rest = modulus_ / qb;
      for (int64_t g : unit_group_generators_prime_power(q, b))
        gens.push_back(crt_with_one(g, qb, rest));
    }

    // Closure of the image of psi from the identity.
    witness_.push_back(BigInt(1));
    tuples_.push_back(psi_tuple(BigInt(1)));
    index_of_[tuples_[0]] = 0;
    std::vector<int> frontier = {0};
    while (!frontier.empty()) {
      int x = frontier.back();
      frontier.pop_back();
      for (const BigInt& g : gens) {
        BigInt w = witness_[x] * g % modulus_;
        auto t = psi_tuple(w);
        auto [it, inserted] = index_of_.emplace(t, static_cast<int>(tuples_.size()));
        if (inserted) {
          tuples_.push_back(t);
          witness_.push_back(w);
          frontier.push_back(it->second);
          if (static_cast<int64_t>(tuples_.size()) > limits_.class_limit)
            fail(ErrorCode::ModulusTooLarge,
                 "composite Galois group exceeds class limit");
        }
      }
    }
  }

  int size() const { return static_cast<int>(tuples_.size()); }
  const BigInt& modulus() const { return modulus_; }
  const std::vector<std::pair<int64_t, int>>& modulus_factors() const {
    return modulus_factors_;
  }
  const std::vector<AbelianFieldQ>& fields() const { return fields_; }
  const BigInt& witness(int id) const { return witness_[id]; }
  int component(int id, int j) const { return tuples_[id][j]; }
  int64_t component_rep(int id, int j) const {
    return cosets_[j].reps[tuples_[id][j]];
  }

  bool divides_modulus(int64_t q) const {
    for (auto [qq, b] : modulus_factors_)
      if (qq == q) return true;
    return false;
  }

  // Order of the j-th component of element id in Gal(F_j/Q).
  int64_t component_order(int id, int j) const {
    return fields_[j].coset_order(component_rep(id, j));
  }

  // psi(t) for an integer coprime to the modulus.
  int element_of(const BigInt& t) const {
    auto tup = psi_tuple(t);
    auto it = index_of_.find(tup);
    if (it == index_of_.end())
      fail(ErrorCode::Internal, "residue outside the composite image");
    return it->second;
  }

  // Element with the given per-field residues (must lie in the image; the
  // image is exactly the set of tuples realized by a single global residue).
  int element_of_components(const std::vector<int64_t>& residues) const {
    if (residues.size() != fields_.size())
      fail(ErrorCode::WrongShape, "component count mismatch");
    std::vector<int> tup(fields_.size());
    for (size_t j = 0; j < fields_.size(); ++j)
      tup[j] = coset_index(j, mod_reduce(residues[j], fields_[j].conductor()));
    auto it = index_of_.find(tup);
    if (it == index_of_.end())
      fail(ErrorCode::Internal, "residues outside the composite image");
    return it->second;
  }

  int frob_element(int64_t q) const {
    if (divides_modulus(q))
      fail(ErrorCode::Internal, "frob_element at a ramified prime");
    return element_of(BigInt(q));
  }

  int mul(int a, int b) const {
    std::vector<int> t(fields_.size());
    for (size_t j = 0; j < fields_.size(); ++j) {
      int64_t f = fields_[j].conductor();
      t[j] = coset_index(j, mulmod(cosets_[j].reps[tuples_[a][j]],
                                   cosets_[j].reps[tuples_[b][j]], f));
    }
    auto it = index_of_.find(t);
    if (it == index_of_.end()) fail(ErrorCode::Internal, "product left group");
    return it->second;
  }

  // Subgroup generated by the given element ids (BFS closure), as sorted ids.
  std::vector<int> span(const std::vector<int>& gens) const {
    std::set<int> seen = {0};
    std::vector<int> frontier = {0};
    while (!frontier.empty()) {
      int x = frontier.back();
      frontier.pop_back();
      for (int g : gens) {
        int y = mul(x, g);
        if (seen.insert(y).second) frontier.push_back(y);
      }
    }
    return {seen.begin(), seen.end()};
  }

  // Decomposition subgroup of the place v inside the composite group.
  std::vector<int> decomposition_subgroup(const Place& v) const {
    std::vector<std::vector<int64_t>> gen_residues;  // per generator: per field
    size_t nf = fields_.size();
    if (v.infinite) {
      std::vector<int64_t> t(nf);
      for (size_t j = 0; j < nf; ++j) t[j] = fields_[j].infinity_residue();
      gen_residues.push_back(t);
    } else {
      std::vector<int64_t> frob(nf);
      for (size_t j = 0; j < nf; ++j)
        frob[j] = fields_[j].frobenius_residue(v.p);
      gen_residues.push_back(frob);
      int A = 0;
      for (auto [q, b] : modulus_factors_)
        if (q == v.p) A = b;
      if (A > 0) {
        // Components of each global inertia generator, aligned across fields.
        std::vector<std::vector<int64_t>> per_field(nf);
        size_t count = unit_group_generators_prime_power(v.p, A).size();
        for (size_t j = 0; j < nf; ++j) {
          per_field[j] = fields_[j].inertia_residues(v.p, A);
          if (per_field[j].size() != count)
            fail(ErrorCode::Internal, "inertia generator misalignment");
        }
        for (size_t k = 0; k < count; ++k) {
          std::vector<int64_t> t(nf);
          for (size_t j = 0; j < nf; ++j) t[j] = per_field[j][k];
          gen_residues.push_back(t);
        }
      }
    }
    std::vector<int> gen_ids;
    for (const auto& res : gen_residues) {
      std::vector<int> tup(nf);
      for (size_t j = 0; j < nf; ++j)
        tup[j] = coset_index(j, mod_reduce(res[j], fields_[j].conductor()));
      auto it = index_of_.find(tup);
      if (it == index_of_.end())
        fail(ErrorCode::Internal, "decomposition generator outside group");
      gen_ids.push_back(it->second);
    }
    return span(gen_ids);
  }

  // Elements whose j-th component is trivial (= Gal over the j-th field).
  std::vector<int> kernel_of(int j) const {
    std::vector<int> out;
    for (int id = 0; id < size(); ++id)
      if (tuples_[id][j] == 0) out.push_back(id);
    return out;
  }

 private:
  struct FieldCosets {
    std::vector<int64_t> reps;  // index -> representative residue
    mutable std::unordered_map<int64_t, int> memo;
  };

  static BigInt crt_with_one(int64_t r, int64_t m, const BigInt& rest) {
    // x = r mod m, x = 1 mod rest (rest coprime to m).
    if (rest == 1) return BigInt(mod_reduce(r, m));
    int64_t rest_mod_m = mod_reduce(rest, m);
    int64_t k = mulmod(mod_reduce(r - 1, m), invmod(rest_mod_m, m), m);
    return BigInt(1) + rest * k;
  }

  int coset_index(size_t j, int64_t r) const {
    auto& fc = cosets_[j];
    auto it = fc.memo.find(r);
    if (it != fc.memo.end()) return it->second;
    const auto& F = fields_[j];
    int64_t f = F.conductor();
    int found = -1;
    for (size_t i = 0; i < fc.reps.size(); ++i) {
      int64_t q = f <= 1 ? 0 : mulmod(r, invmod(fc.reps[i], f), f);
      if (F.contains(q) || f <= 1) { found = static_cast<int>(i); break; }
    }
    if (found < 0) {
      found = static_cast<int>(fc.reps.size());
      fc.reps.push_back(r);
    }
    fc.memo.emplace(r, found);
    return found;
  }

  std::vector<int> psi_tuple(const BigInt& t) const {
    std::vector<int> tup(fields_.size());
    for (size_t j = 0; j < fields_.size(); ++j)
      tup[j] = coset_index(j, mod_reduce(t, fields_[j].conductor()));
    return tup;
  }

  std::vector<AbelianFieldQ> fields_;
  Limits limits_;
  BigInt modulus_;
  std::vector<std::pair<int64_t, int>> modulus_factors_;
  mutable std::vector<FieldCosets> cosets_;
  std::vector<std::vector<int>> tuples_;
  std::vector<BigInt> witness_;
  std::map<std::vector<int>, int> index_of_;
};

// A pivot-and-factors context: cyclic pivot K of degree p^e plus the other
// factors, with factor order normalized to descending e_i.
struct Context {
  AbelianFieldQ pivot;
  std::vector<AbelianFieldQ> factors;   // sorted by descending e_i
  std::vector<int> original_index;     // sorted position -> caller position
  int64_t p = 0;
  int e = 0;
  std::vector<int> exps;               // e_i, descending
  std::shared_ptr<const CompositeGalois> G;  // fields: [pivot, callers' order]
  Limits limits;

  // Composite component index of the i-th (sorted) factor.
  int comp_of_factor(int i) const { return 1 + original_index[i]; }
};

inline Context make_context(const AbelianFieldQ& pivot,
                            const std::vector<AbelianFieldQ>& factors,
                            const Limits& limits = {}) {
  Context ctx{pivot};
  ctx.limits = limits;
  if (!pivot.is_quotient_cyclic())
    fail(ErrorCode::NonCyclic, "pivot field must be cyclic");
  auto fs = factorize64(pivot.degree());
  if (fs.size() != 1)
    fail(ErrorCode::NotPrimeDegree,
         "pivot degree must be a prime power > 1, got " +
             std::to_string(pivot.degree()));
  ctx.p = fs[0].first;
  ctx.e = fs[0].second;

  std::vector<AbelianFieldQ> all = {pivot};
  for (const auto& F : factors) all.push_back(F);
  ctx.G = std::make_shared<CompositeGalois>(std::move(all), limits);

  // e_i = log_p |image of Gal(over K_i) in Gal(K/Q)|.
  size_t m = factors.size();
  std::vector<int> raw_exps(m);
  for (size_t i = 0; i < m; ++i) {
    std::set<int> image;
    for (int id : ctx.G->kernel_of(static_cast<int>(1 + i)))
      image.insert(ctx.G->component(id, 0));
    raw_exps[i] = log_exact(static_cast<int64_t>(image.size()), ctx.p);
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw_exps[a] > raw_exps[b]; });
  for (int idx : order) {
    ctx.factors.push_back(factors[idx]);
    ctx.original_index.push_back(idx);
    ctx.exps.push_back(raw_exps[idx]);
  }
  return ctx;
}

// Exponent data of one class given its decomposition subgroup (as ids).
namespace detail {
inline PlaceClass class_from_subgroup(const Context& ctx,
                                      const std::vector<int>& D) {
  PlaceClass cls;
  std::set<int> pivot_image;
  for (int id : D) pivot_image.insert(ctx.G->component(id, 0));
  cls.pivot_exp = log_exact(static_cast<int64_t>(pivot_image.size()), ctx.p);
  size_t m = ctx.factors.size();
  cls.exps.resize(m);
  for (size_t i = 0; i < m; ++i) {
    int cj = ctx.comp_of_factor(static_cast<int>(i));
    std::set<int> image;
    for (int id : D)
      if (ctx.G->component(id, cj) == 0) image.insert(ctx.G->component(id, 0));
    cls.exps[i] = log_exact(static_cast<int64_t>(image.size()), ctx.p);
  }
  return cls;
}
}  // namespace detail

// Full profile: one Frob class per composite Galois element (witness kept),
// then one exceptional class per ramified prime and for the real place.
inline SplittingProfile build_profile(const Context& ctx) {
  SplittingProfile pr;
  pr.p = ctx.p;
  pr.e = ctx.e;
  pr.exps = ctx.exps;
  size_t m = ctx.factors.size();

  for (int id = 0; id < ctx.G->size(); ++id) {
    PlaceClass cls;
    cls.kind = PlaceClass::Kind::Frob;
    cls.value = ctx.G->witness(id);
    int64_t oK = ctx.G->component_order(id, 0);
    cls.pivot_exp = log_exact(oK, ctx.p);
    cls.exps.resize(m);
    for (size_t i = 0; i < m; ++i) {
      int64_t oi = ctx.G->component_order(id, ctx.comp_of_factor(static_cast<int>(i)));
      cls.exps[i] = log_exact(oK / std::gcd(oK, oi), ctx.p);
    }
    pr.classes.push_back(std::move(cls));
  }
  for (auto [q, b] : ctx.G->modulus_factors()) {
    PlaceClass cls =
        detail::class_from_subgroup(ctx, ctx.G->decomposition_subgroup(Place::at(q)));
    cls.kind = PlaceClass::Kind::Prime;
    cls.value = q;
    pr.classes.push_back(std::move(cls));
  }
  {
    PlaceClass cls = detail::class_from_subgroup(
        ctx, ctx.G->decomposition_subgroup(Place::infinity()));
    cls.kind = PlaceClass::Kind::Infty;
    pr.classes.push_back(std::move(cls));
  }

  for (const auto& cls : pr.classes) {
    for (size_t i = 0; i < m; ++i)
      if (cls.exps[i] > pr.exps[i])
        fail(ErrorCode::Internal, "class exponent exceeds global bound");
    if (cls.pivot_exp > pr.e)
      fail(ErrorCode::Internal, "pivot class exponent exceeds e");
  }
  return pr;
}

// Index into profile.classes of the class containing the place v.
inline size_t class_of_place(const Context& ctx, const SplittingProfile& pr,
                             const Place& v) {
  if (v.infinite) return pr.classes.size() - 1;
  if (ctx.G->divides_modulus(v.p)) {
    for (size_t c = ctx.G->size(); c < pr.classes.size(); ++c)
      if (pr.classes[c].kind == PlaceClass::Kind::Prime &&
          pr.classes[c].value == v.p)
        return c;
    fail(ErrorCode::Internal, "missing exceptional class");
  }
  return static_cast<size_t>(ctx.G->frob_element(v.p));
}

inline int local_degree_exponent(const SplittingProfile& pr, int i,
                                 const PlaceClass& cls) {
  if (i < 0 || i >= static_cast<int>(cls.exps.size()))
    fail(ErrorCode::Internal, "factor index out of range");
  (void)pr;
  return cls.exps[i];
}

// cls lies in Sigma_i^d  <=>  e_{i,cls} <= d.
inline bool sigma_membership(const SplittingProfile& pr, int i, int d,
                             const PlaceClass& cls) {
  if (d < 0) fail(ErrorCode::WrongExponent, "sigma membership needs d >= 0");
  return local_degree_exponent(pr, i, cls) <= d;
}

// Profile of the index-p subfield context (pivot replaced by its degree
// p^{e-1} subfield): every exponent decrements with clamping at zero.
inline SplittingProfile derive_subfield_profile(const SplittingProfile& pr) {
  if (pr.e < 1) fail(ErrorCode::WrongExponent, "no proper subfield context");
  SplittingProfile out;
  out.p = pr.p;
  out.e = pr.e - 1;
  auto drop = [](int x) { return std::max(x - 1, 0); };
  for (int x : pr.exps) out.exps.push_back(drop(x));
  for (const auto& cls : pr.classes) {
    PlaceClass c2 = cls;
    for (auto& x : c2.exps) x = drop(x);
    c2.pivot_exp = drop(c2.pivot_exp);
    out.classes.push_back(std::move(c2));
  }
  return out;
}

// Profile with every exponent clamped to {0,1}: the relative-group data.
inline SplittingProfile derive_relative_profile(const SplittingProfile& pr) {
  SplittingProfile out;
  out.p = pr.p;
  out.e = std::min(pr.e, 1);
  for (int x : pr.exps) out.exps.push_back(std::min(x, 1));
  for (const auto& cls : pr.classes) {
    PlaceClass c2 = cls;
    for (auto& x : c2.exps) x = std::min(x, 1);
    c2.pivot_exp = std::min(c2.pivot_exp, 1);
    out.classes.push_back(std::move(c2));
  }
  return out;
}

// Profile restricted to the factors with e_i = e (the primitive subproduct).
inline SplittingProfile derive_prim_profile(const SplittingProfile& pr) {
  SplittingProfile out;
  out.p = pr.p;
  out.e = pr.e;
  std::vector<size_t> keep;
  for (size_t i = 0; i < pr.exps.size(); ++i)
    if (pr.exps[i] == pr.e) keep.push_back(i);
  for (size_t i : keep) out.exps.push_back(pr.exps[i]);
  for (const auto& cls : pr.classes) {
    PlaceClass c2;
    c2.kind = cls.kind;
    c2.value = cls.value;
    c2.pivot_exp = cls.pivot_exp;
    for (size_t i : keep) c2.exps.push_back(cls.exps[i]);
    out.classes.push_back(std::move(c2));
  }
  return out;
}

}  // namespace multinorm
