#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "multinorm/abelian_q.hpp"
#include "multinorm/fraction.hpp"
#include "multinorm/sha_core.hpp"
#include "multinorm/splitting.hpp"

namespace multinorm {

// ---- Hasse invariants of cyclic algebras -------------------------------------

// Local invariant of the cyclic algebra (K, c) at the place v, for K cyclic
// over Q with Galois generator g: the fraction j/d mod 1 where the local
// Artin symbol of c acts on K as g^j.  Zero exactly when c is a local norm.
// The generator defaults to the smallest residue generating the quotient; an
// explicit generator (e.g. the restriction of a bigger field's generator)
// rescales the invariant by a unit without changing its vanishing.
inline QmodZ hasse_invariant(const AbelianFieldQ& K, const Rational& c,
                             const Place& v,
                             std::optional<int64_t> generator = std::nullopt) {
  if (c == 0) fail(ErrorCode::ZeroInput, "hasse_invariant: c must be nonzero");
  int64_t d = K.degree();
  if (d == 1) return QmodZ();
  int64_t g = generator ? mod_reduce(*generator, K.conductor())
                        : K.smallest_quotient_generator();
  if (K.coset_order(g) != d)
    fail(ErrorCode::ZeroInput,
         "hasse_invariant: residue does not generate the Galois group");
  int64_t j = K.quotient_dlog(K.local_artin_residue(v, c), g);
  return QmodZ(j, d);
}

// Places where the invariant of (K, c) can be nonzero: the real place, the
// primes ramified in K, and the primes dividing c.  Everywhere else c is a
// local unit and K is unramified, so the symbol is trivial.
inline std::vector<Place> invariant_support(const AbelianFieldQ& K,
                                            const Rational& c) {
  if (c == 0) fail(ErrorCode::ZeroInput, "support of 0");
  std::set<int64_t> qs;
  for (auto [q, b] : factorize64(K.conductor())) {
    (void)b;
    qs.insert(q);
  }
  for (auto [q, e] : factor_rational(c).factors) {
    (void)e;
    qs.insert(q);
  }
  std::vector<Place> out = {Place::infinity()};
  for (int64_t q : qs) out.push_back(Place::at(q));
  return out;
}

// All local invariants of (K, c) over the finite support, with the sum-to-zero
// reciprocity law enforced as a hard self-check.
struct InvariantLedger {
  std::vector<std::pair<Place, QmodZ>> entries;  // real place first, then
                                                 // primes ascending

  QmodZ at(const Place& v) const {
    for (const auto& [w, inv] : entries)
      if (w == v) return inv;
    return QmodZ();
  }

  QmodZ total() const {
    QmodZ s;
    for (const auto& [w, inv] : entries) {
      (void)w;
      s = s + inv;
    }
    return s;
  }
};

inline InvariantLedger build_ledger(const AbelianFieldQ& K, const Rational& c,
                                    std::optional<int64_t> generator =
                                        std::nullopt) {
  InvariantLedger led;
  for (const Place& v : invariant_support(K, c))
    led.entries.emplace_back(v, hasse_invariant(K, c, v, generator));
  if (!led.total().is_zero())
    fail(ErrorCode::Internal,
         "reciprocity failure: local invariants sum to " + led.total().str());
  return led;
}

// ---- local solvability --------------------------------------------------------

// Local solvability engine for the product L: c is a local norm from L at v
// iff its Artin image lies in the subgroup of the decomposition group
// generated by the per-factor kernel intersections.  Caches per place.
class LocalSolver {
 public:
  explicit LocalSolver(std::vector<AbelianFieldQ> L, const Limits& limits = {})
      : fields_(std::move(L)) {
    if (fields_.empty()) fail(ErrorCode::ZeroInput, "empty product");
    G_ = std::make_shared<CompositeGalois>(fields_, limits);
  }

  const CompositeGalois& group() const { return *G_; }
  const std::vector<AbelianFieldQ>& fields() const { return fields_; }

  bool solvable_at(const Rational& c, const Place& v) const {
    if (c == 0) fail(ErrorCode::ZeroInput, "local solvability of 0");
    std::vector<int64_t> res(fields_.size());
    for (size_t j = 0; j < fields_.size(); ++j)
      res[j] = fields_[j].local_artin_residue(v, c);
    int id = G_->element_of_components(res);
    return norm_symbol_subgroup(v).count(id) != 0;
  }

  // Finite set of places that decides everywhere-local solvability: the real
  // place, primes of the common modulus, and primes dividing c.
  std::vector<Place> support(const Rational& c) const {
    if (c == 0) fail(ErrorCode::ZeroInput, "support of 0");
    std::set<int64_t> qs;
    for (auto [q, b] : G_->modulus_factors()) {
      (void)b;
      qs.insert(q);
    }
    for (auto [q, e] : factor_rational(c).factors) {
      (void)e;
      qs.insert(q);
    }
    std::vector<Place> out = {Place::infinity()};
    for (int64_t q : qs) out.push_back(Place::at(q));
    return out;
  }

  std::optional<Place> first_failure(const Rational& c) const {
    for (const Place& v : support(c))
      if (!solvable_at(c, v)) return v;
    return std::nullopt;
  }

 private:
  // Artin image of the product of the factors' local norm groups at v.
  const std::set<int>& norm_symbol_subgroup(const Place& v) const {
    auto it = cache_.find(v);
    if (it != cache_.end()) return it->second;
    auto D = G_->decomposition_subgroup(v);
    std::vector<int> gens;
    for (size_t j = 0; j < fields_.size(); ++j)
      for (int id : D)
        if (G_->component(id, static_cast<int>(j)) == 0) gens.push_back(id);
    auto sp = G_->span(gens);
    return cache_.emplace(v, std::set<int>(sp.begin(), sp.end())).first->second;
  }

  std::vector<AbelianFieldQ> fields_;
  std::shared_ptr<CompositeGalois> G_;
  mutable std::map<Place, std::set<int>> cache_;
};

inline bool locally_solvable(const std::vector<AbelianFieldQ>& L,
                             const Rational& c, const Place& v,
                             const Limits& limits = {}) {
  return LocalSolver(L, limits).solvable_at(c, v);
}

struct LocalCheck {
  bool ok = false;
  std::optional<Place> witness;  // first failing place when !ok
};

inline LocalCheck locally_solvable_everywhere(
    const std::vector<AbelianFieldQ>& L, const Rational& c,
    const Limits& limits = {}) {
  LocalSolver s(L, limits);
  auto w = s.first_failure(c);
  return {!w.has_value(), w};
}

// ---- the obstruction character ------------------------------------------------

// Value of the character attached to c on one ambient tuple a of the context's
// covering group: the sum over the pivot ledger's support of n(v) inv(K, c)_v,
// with n(v) any covering index of v's class for a (the smallest by default,
// the largest when largest_n is set — the result is independent of the
// choice).
inline QmodZ alpha_character_value(const Context& ctx,
                                   const SplittingProfile& pr,
                                   const Rational& c,
                                   const std::vector<int64_t>& a,
                                   bool largest_n = false,
                                   std::optional<int64_t> generator =
                                       std::nullopt) {
  auto led = build_ledger(ctx.pivot, c, generator);
  QmodZ sum;
  for (const auto& [v, inv] : led.entries) {
    if (inv.is_zero()) continue;
    const PlaceClass& cls = pr.classes[class_of_place(ctx, pr, v)];
    int64_t n = -1;
    if (largest_n) {
      int64_t count = ipow(pr.p, pr.exps.empty() ? 0 : pr.exps[0]);
      for (int64_t t = count - 1; t >= 0; --t)
        if (omega_covers_with(pr, a, cls, t)) {
          n = t;
          break;
        }
    } else if (auto nn = omega_covers(pr, a, cls)) {
      n = *nn;
    }
    if (n < 0)
      fail(ErrorCode::Internal, "character evaluated outside the covering group");
    sum = sum + inv.times(n);
  }
  return sum;
}

// Character values on the generators of each prime-power component.
struct Obstruction {
  struct PrimePart {
    int64_t p = 0;
    std::vector<QmodZ> generator_values;
  };
  std::vector<PrimePart> parts;

  bool zero() const {
    for (const auto& part : parts)
      for (const auto& val : part.generator_values)
        if (!val.is_zero()) return false;
    return true;
  }

  std::vector<QmodZ> flat() const {
    std::vector<QmodZ> out;
    for (const auto& part : parts)
      for (const auto& val : part.generator_values) out.push_back(val);
    return out;
  }
};

enum class Verdict { Solvable, Obstructed, NoLocalSolution };

struct DecisionReport {
  Verdict verdict = Verdict::Solvable;
  std::optional<Place> witness;            // for NoLocalSolution
  std::optional<Obstruction> obstruction;  // present when the character ran
};

struct KnotRep {
  Rational c;
  Obstruction character;
};

struct KnotReport {
  std::vector<KnotRep> reps;
  bool complete = false;   // characters found generate the whole dual group
  BigInt group_order = 1;  // |Sha|
  int64_t scanned = 0;     // candidates examined
};

// Decision engine for one product with a designated cyclic pivot: caches the
// composite group, the per-prime contexts/profiles, and the obstruction
// group, then answers solvability queries per c.
class Analyzer {
 public:
  Analyzer(std::vector<AbelianFieldQ> L, size_t pivot_index,
           const Limits& limits = {})
      : L_(std::move(L)), limits_(limits), solver_(L_, limits) {
    if (pivot_index >= L_.size())
      fail(ErrorCode::ZeroInput, "pivot index out of range");
    const AbelianFieldQ& pivot = L_[pivot_index];
    if (!pivot.is_quotient_cyclic())
      fail(ErrorCode::NoCyclicFactor, "designated pivot factor is not cyclic");
    std::vector<AbelianFieldQ> others;
    for (size_t i = 0; i < L_.size(); ++i)
      if (i != pivot_index) others.push_back(L_[i]);
    for (auto [p, k] : factorize64(pivot.degree())) {
      (void)k;
      Context ctx = make_context(pivot.p_part_subfield(p, limits_), others,
                                 limits_);
      SplittingProfile pr = build_profile(ctx);
      ShaComponent comp = compute_sha_prime_power(pr, limits_);
      sha_.components.push_back(
          detail::restore_caller_order(comp, ctx.original_index));
      primes_.push_back(PrimeData{p, std::move(ctx), std::move(pr),
                                  std::move(comp)});
    }
  }

  const ShaGroup& sha() const { return sha_; }
  const LocalSolver& solver() const { return solver_; }

  std::optional<Place> local_obstruction(const Rational& c) const {
    return solver_.first_failure(c);
  }

  // The character of c on the generators of every component.  Requires c to
  // be a local norm everywhere.
  Obstruction alpha(const Rational& c) const {
    if (auto w = solver_.first_failure(c))
      fail(ErrorCode::NotLocallySolvable,
           "no local solution at " + w->str());
    Obstruction ob;
    for (const auto& d : primes_) {
      Obstruction::PrimePart part;
      part.p = d.p;
      for (const auto& gen : d.component.generators)
        part.generator_values.push_back(
            alpha_character_value(d.ctx, d.profile, c, gen));
      ob.parts.push_back(std::move(part));
    }
    return ob;
  }

  DecisionReport decide(const Rational& c) const {
    if (c == 0) fail(ErrorCode::ZeroInput, "decide: c must be nonzero");
    if (auto w = solver_.first_failure(c))
      return {Verdict::NoLocalSolution, w, std::nullopt};
    if (sha_.trivial()) return {Verdict::Solvable, std::nullopt, std::nullopt};
    Obstruction ob = alpha(c);
    if (ob.zero()) return {Verdict::Solvable, std::nullopt, std::move(ob)};
    return {Verdict::Obstructed, std::nullopt, std::move(ob)};
  }

  // Scan c by ascending height (positives before negatives at each height)
  // for everywhere-local c whose characters generate the dual group; stop at
  // full coverage or the height bound.  Greedy collection plus a final
  // redundancy sweep keeps the representative list minimal.
  KnotReport knot_group(int64_t height_bound) const {
    KnotReport rep;
    rep.group_order = sha_.order();
    std::set<std::vector<QmodZ>> span;
    span.insert(std::vector<QmodZ>(flat_size(), QmodZ()));
    if (BigInt(span.size()) == rep.group_order) {
      rep.complete = true;
      return rep;
    }
    for (int64_t h = 1; h <= height_bound && !rep.complete; ++h) {
      for (const Rational& c : rationals_of_height(h)) {
        ++rep.scanned;
        if (solver_.first_failure(c)) continue;
        Obstruction ob = alpha(c);
        auto f = ob.flat();
        if (span.count(f)) continue;
        rep.reps.push_back({c, std::move(ob)});
        extend_span(span, f);
        if (BigInt(span.size()) == rep.group_order) {
          rep.complete = true;
          break;
        }
      }
    }
    minimize_reps(rep);
    return rep;
  }

  // Deterministic scan order: reduced fractions of height exactly h,
  // positives ascending, then their negatives in the same order.
  static std::vector<Rational> rationals_of_height(int64_t h) {
    std::vector<Rational> pos;
    if (h == 1) {
      pos.emplace_back(1);
    } else {
      for (int64_t n = 1; n < h; ++n)
        if (std::gcd(n, h) == 1) pos.emplace_back(n, h);
      for (int64_t d = h - 1; d >= 1; --d)
        if (std::gcd(h, d) == 1) pos.emplace_back(h, d);
    }
    std::vector<Rational> out = pos;
    for (const Rational& c : pos) out.push_back(-c);
    return out;
  }

 private:
  struct PrimeData {
    int64_t p;
    Context ctx;
    SplittingProfile profile;
    ShaComponent component;  // internal (sorted) column order, matches profile
  };

  size_t flat_size() const {
    size_t n = 0;
    for (const auto& d : primes_) n += d.component.generators.size();
    return n;
  }

  static std::vector<QmodZ> add_flat(const std::vector<QmodZ>& a,
                                     const std::vector<QmodZ>& b) {
    std::vector<QmodZ> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
  }

  static void extend_span(std::set<std::vector<QmodZ>>& span,
                          const std::vector<QmodZ>& g) {
    std::vector<std::vector<QmodZ>> work = {g};
    while (!work.empty()) {
      auto x = work.back();
      work.pop_back();
      if (!span.insert(x).second) continue;
      std::vector<std::vector<QmodZ>> snapshot(span.begin(), span.end());
      for (const auto& s : snapshot) work.push_back(add_flat(x, s));
    }
  }

  void minimize_reps(KnotReport& rep) const {
    for (size_t k = rep.reps.size(); k-- > 0;) {
      std::set<std::vector<QmodZ>> others;
      others.insert(std::vector<QmodZ>(flat_size(), QmodZ()));
      for (size_t j = 0; j < rep.reps.size(); ++j)
        if (j != k) extend_span(others, rep.reps[j].character.flat());
      if (others.count(rep.reps[k].character.flat()))
        rep.reps.erase(rep.reps.begin() + static_cast<ptrdiff_t>(k));
    }
  }

  std::vector<AbelianFieldQ> L_;
  Limits limits_;
  LocalSolver solver_;
  std::vector<PrimeData> primes_;
  ShaGroup sha_;
};

// One-shot conveniences mirroring the Analyzer methods.
inline Obstruction alpha(const std::vector<AbelianFieldQ>& L,
                         size_t pivot_index, const Rational& c,
                         const Limits& limits = {}) {
  return Analyzer(L, pivot_index, limits).alpha(c);
}

inline DecisionReport decide(const std::vector<AbelianFieldQ>& L,
                             size_t pivot_index, const Rational& c,
                             const Limits& limits = {}) {
  return Analyzer(L, pivot_index, limits).decide(c);
}

inline KnotReport knot_group(const std::vector<AbelianFieldQ>& L,
                             size_t pivot_index, int64_t height_bound,
                             const Limits& limits = {}) {
  return Analyzer(L, pivot_index, limits).knot_group(height_bound);
}

}  // namespace multinorm
