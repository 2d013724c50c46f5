#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "multinorm/abelian_q.hpp"
#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"
#include "multinorm/smith.hpp"
#include "multinorm/splitting.hpp"

namespace multinorm {

// delta(x mod p^s, y mod p^t): the largest d <= min(s, t) with x = y mod p^d.
inline int delta(int64_t p, int64_t x, int s, int64_t y, int t) {
  if (s < 0 || t < 0) fail(ErrorCode::WrongExponent, "delta: negative modulus");
  int bound = std::min(s, t);
  int d = 0;
  int64_t q = 1;
  while (d < bound) {
    q *= p;
    if (mod_reduce(x, q) != mod_reduce(y, q)) break;
    ++d;
  }
  return d;
}

// I_n(a) = { i : n = a_i mod p^{e_i} }  (0-based indices, ascending).
inline std::vector<int> index_set(int64_t p, const std::vector<int>& exps,
                                  const std::vector<int64_t>& a, int64_t n) {
  if (a.size() != exps.size())
    fail(ErrorCode::WrongShape, "index_set: tuple length mismatch");
  std::vector<int> out;
  for (size_t i = 0; i < a.size(); ++i)
    if (mod_reduce(n, ipow(p, exps[i])) == mod_reduce(a[i], ipow(p, exps[i])))
      out.push_back(static_cast<int>(i));
  return out;
}

// A full index tuple (I_0, ..., I_{p^{e_1}-1}) for a.
inline std::vector<std::vector<int>> index_tuple(int64_t p,
                                                 const std::vector<int>& exps,
                                                 const std::vector<int64_t>& a) {
  if (exps.empty()) fail(ErrorCode::ZeroInput, "index_tuple: no factors");
  int64_t count = ipow(p, exps[0]);
  std::vector<std::vector<int>> out;
  for (int64_t n = 0; n < count; ++n) out.push_back(index_set(p, exps, a, n));
  return out;
}

// Coherence of a tuple of subsets of {0..m-1}:
//   (1) i in I_{n1} and I_{n2}  =>  n1 = n2 mod p^{e_i};
//   (2) i in I_{n1} and n1 = n2 mod p^{e_i}  =>  i in I_{n2};
// together with the ambient requirement that the union covers {0..m-1}.
inline bool coherence_check(int64_t p, const std::vector<int>& exps,
                            const std::vector<std::vector<int>>& tuple) {
  if (exps.empty()) fail(ErrorCode::ZeroInput, "coherence_check: no factors");
  if (static_cast<int64_t>(tuple.size()) != ipow(p, exps[0]))
    fail(ErrorCode::WrongShape, "coherence_check: tuple length mismatch");
  size_t m = exps.size();
  std::vector<char> seen(m, 0);
  for (const auto& I : tuple)
    for (int i : I) {
      if (i < 0 || i >= static_cast<int>(m))
        fail(ErrorCode::WrongShape, "coherence_check: index out of range");
      seen[i] = 1;
    }
  if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(m))
    return false;
  for (size_t i = 0; i < m; ++i) {
    int64_t q = ipow(p, exps[i]);
    for (int64_t n1 = 0; n1 < static_cast<int64_t>(tuple.size()); ++n1) {
      bool in1 = std::binary_search(tuple[n1].begin(), tuple[n1].end(),
                                    static_cast<int>(i));
      if (!in1) continue;
      for (int64_t n2 = 0; n2 < static_cast<int64_t>(tuple.size()); ++n2) {
        bool in2 = std::binary_search(tuple[n2].begin(), tuple[n2].end(),
                                      static_cast<int>(i));
        bool congruent = mod_reduce(n1, q) == mod_reduce(n2, q);
        if (in2 && !congruent) return false;   // condition (1)
        if (congruent && !in2) return false;   // condition (2)
      }
    }
  }
  return true;
}

// Inverse of the index-tuple map on coherent tuples.
inline std::vector<int64_t> invert_index_tuple(
    int64_t p, const std::vector<int>& exps,
    const std::vector<std::vector<int>>& tuple) {
  if (!coherence_check(p, exps, tuple))
    fail(ErrorCode::NotCoherent, "index tuple is not coherent");
  size_t m = exps.size();
  std::vector<int64_t> a(m, -1);
  for (int64_t n = 0; n < static_cast<int64_t>(tuple.size()); ++n)
    for (int i : tuple[n])
      if (a[i] < 0) a[i] = mod_reduce(n, ipow(p, exps[i]));
  return a;
}

// ---- covering --------------------------------------------------------------
//
// A class v is covered by (a, n) iff n = a_i mod p^{e_{i,v}} for every i;
// this is the definitional condition "e_{i,v} <= delta(n, a_i) for all
// i outside I_n(a)", since members of I_n(a) satisfy it automatically.

inline bool omega_covers_with(const SplittingProfile& pr,
                              const std::vector<int64_t>& a,
                              const PlaceClass& cls, int64_t n) {
  if (a.size() != pr.exps.size())
    fail(ErrorCode::WrongShape, "covering: tuple length mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t q = ipow(pr.p, cls.exps[i]);
    if (mod_reduce(n, q) != mod_reduce(a[i], q)) return false;
  }
  return true;
}

// Smallest n with cls covered by (a, n), if any.
inline std::optional<int64_t> omega_covers(const SplittingProfile& pr,
                                           const std::vector<int64_t>& a,
                                           const PlaceClass& cls) {
  if (a.size() != pr.exps.size())
    fail(ErrorCode::WrongShape, "covering: tuple length mismatch");
  size_t strongest = 0;
  int dmax = 0;
  for (size_t i = 0; i < cls.exps.size(); ++i)
    if (cls.exps[i] > dmax) { dmax = cls.exps[i]; strongest = i; }
  if (dmax == 0) return 0;
  int64_t n = mod_reduce(a[strongest], ipow(pr.p, dmax));
  if (!omega_covers_with(pr, a, cls, n)) return std::nullopt;
  return n;
}

inline bool membership_G(const SplittingProfile& pr,
                         const std::vector<int64_t>& a) {
  for (const auto& cls : pr.classes)
    if (!omega_covers(pr, a, cls)) return false;
  return true;
}

namespace detail {

// Depth-first enumeration of { a in G : a_1 = 0 }, pruning a partial tuple as
// soon as some class has no viable covering index left.  Constraint state per
// class: the congruence n = r mod p^d accumulated so far.
inline std::vector<std::vector<int64_t>> covering_leaves(
    const SplittingProfile& pr, const Limits& limits) {
  size_t m = pr.exps.size();
  int64_t ambient = 1;
  for (int e_i : pr.exps) {
    ambient *= ipow(pr.p, e_i);
    if (ambient > limits.ambient_limit)
      fail(ErrorCode::AmbientTooLarge,
           "ambient group exceeds limit " + std::to_string(limits.ambient_limit));
  }

  // Unique nonzero constraint vectors.
  std::set<std::vector<int>> uniq;
  for (const auto& cls : pr.classes) {
    if (cls.exps.size() != m)
      fail(ErrorCode::MalformedProfile, "class exponent length mismatch");
    bool nonzero = false;
    for (int x : cls.exps) nonzero = nonzero || x > 0;
    if (nonzero) uniq.insert(cls.exps);
  }
  std::vector<std::vector<int>> cons(uniq.begin(), uniq.end());

  std::vector<std::vector<int64_t>> leaves;
  std::vector<int64_t> a(m, 0);
  struct State { int d; int64_t r; };
  std::vector<State> state(cons.size());
  for (size_t c = 0; c < cons.size(); ++c) state[c] = {cons[c][0], 0};

  auto rec = [&](auto&& self, size_t i, std::vector<State> st) -> void {
    if (i == m) {
      leaves.push_back(a);
      return;
    }
    int64_t range = ipow(pr.p, pr.exps[i]);
    for (int64_t v = 0; v < range; ++v) {
      bool ok = true;
      std::vector<State> next = st;
      for (size_t c = 0; c < cons.size() && ok; ++c) {
        int f = cons[c][i];
        int64_t q = ipow(pr.p, std::min(st[c].d, f));
        if (mod_reduce(st[c].r, q) != mod_reduce(v, q)) { ok = false; break; }
        if (f > st[c].d) next[c] = {f, mod_reduce(v, ipow(pr.p, f))};
      }
      if (!ok) continue;
      a[i] = v;
      self(self, i + 1, next);
      a[i] = 0;
    }
  };
  rec(rec, 1, state);
  return leaves;
}

}  // namespace detail

// All of G, sorted lexicographically.
inline std::vector<std::vector<int64_t>> enumerate_membership_group(
    const SplittingProfile& pr, const Limits& limits = {}) {
  size_t m = pr.exps.size();
  if (m == 0) return {std::vector<int64_t>{}};
  if (pr.exps[0] == 0) return {std::vector<int64_t>(m, 0)};
  auto leaves = detail::covering_leaves(pr, limits);
  std::vector<std::vector<int64_t>> rows;
  int64_t dord = ipow(pr.p, pr.exps[0]);
  for (const auto& leaf : leaves)
    for (int64_t n = 0; n < dord; ++n) {
      std::vector<int64_t> row(m);
      for (size_t i = 0; i < m; ++i)
        row[i] = mod_reduce(leaf[i] + n, ipow(pr.p, pr.exps[i]));
      rows.push_back(std::move(row));
    }
  std::sort(rows.begin(), rows.end());
  return rows;
}

// The obstruction group at a fixed prime.
struct ShaComponent {
  int64_t p = 0;
  int e = 0;
  std::vector<int> ambient_exponents;      // e_i per reported column
  std::vector<int64_t> invariant_factors;  // ascending divisibility, all > 1
  std::vector<std::vector<int64_t>> generators;  // coset reps, one per factor
  // factor_order[k] = reported column holding the k-th internally sorted
  // (descending e_i) factor; identity when no caller order is known.
  std::vector<int> factor_order;
  int64_t group_order = 1;     // |G|
  int64_t diagonal_order = 1;  // |D|

  int64_t sha_order() const {
    int64_t r = 1;
    for (int64_t f : invariant_factors) r *= f;
    return r;
  }
  bool trivial() const { return invariant_factors.empty(); }
};

inline ShaComponent compute_sha_prime_power(const SplittingProfile& pr,
                                            const Limits& limits = {}) {
  size_t m = pr.exps.size();
  for (size_t i = 1; i < m; ++i)
    if (pr.exps[i] > pr.exps[i - 1])
      fail(ErrorCode::MalformedProfile, "exponents must be sorted descending");
  ShaComponent out;
  out.p = pr.p;
  out.e = pr.e;
  out.ambient_exponents = pr.exps;
  out.factor_order.resize(m);
  std::iota(out.factor_order.begin(), out.factor_order.end(), 0);
  if (m == 0 || pr.exps[0] == 0) return out;  // trivial ambient

  auto leaves = detail::covering_leaves(pr, limits);
  out.diagonal_order = ipow(pr.p, pr.exps[0]);
  out.group_order = out.diagonal_order * static_cast<int64_t>(leaves.size());

  // Lattice of G inside Z^m: the leaves, the diagonal, and p^{e_i} units.
  Mat rows;
  for (const auto& leaf : leaves) {
    std::vector<BigInt> r(m);
    for (size_t i = 0; i < m; ++i) r[i] = leaf[i];
    rows.push_back(std::move(r));
  }
  rows.push_back(std::vector<BigInt>(m, 1));
  Mat d_rows = {std::vector<BigInt>(m, 1)};
  for (size_t i = 0; i < m; ++i) {
    std::vector<BigInt> unit(m, 0);
    unit[i] = ipow(pr.p, pr.exps[i]);
    rows.push_back(unit);               // copy: both lattices need the row
    d_rows.push_back(std::move(unit));
  }
  Mat B = hnf_row_basis(rows, m);
  BigInt ambient = 1;
  for (int e_i : pr.exps) ambient *= ipow(pr.p, e_i);
  if (ambient != hnf_det(B) * out.group_order)
    fail(ErrorCode::Internal, "group closure check failed");

  Mat BD = hnf_row_basis(d_rows, m);
  Mat X;
  for (const auto& row : BD) {
    auto sol = solve_in_lattice(B, row);
    if (!sol) fail(ErrorCode::Internal, "diagonal lattice not contained");
    X.push_back(*sol);
  }
  SmithResult s = smith_normal_form(X);
  Mat C = mat_mul(s.W, B);
  for (size_t k = 0; k < s.diag.size(); ++k) {
    if (s.diag[k] <= 1) continue;
    BigInt f = s.diag[k];
    int64_t f64 = static_cast<int64_t>(f);
    // Each invariant factor is a p-power dividing p^{e_1}.
    int64_t chk = f64;
    while (chk % pr.p == 0) chk /= pr.p;
    if (chk != 1 || f64 > out.diagonal_order)
      fail(ErrorCode::Internal, "invariant factor outside expected range");
    out.invariant_factors.push_back(f64);
    std::vector<int64_t> rep(m);
    for (size_t i = 0; i < m; ++i)
      rep[i] = mod_reduce(C[k][i], ipow(pr.p, pr.exps[i]));
    out.generators.push_back(std::move(rep));
  }
  // |G| / |D| must equal the product of the invariant factors.
  if (out.sha_order() * out.diagonal_order != out.group_order)
    fail(ErrorCode::Internal, "quotient order mismatch");
  for (size_t k = 1; k < out.invariant_factors.size(); ++k)
    if (out.invariant_factors[k] % out.invariant_factors[k - 1] != 0)
      fail(ErrorCode::Internal, "invariant factors do not form a chain");
  return out;
}

// ---- maps of the subfield exact sequence ------------------------------------

// Exponents of the index-p subfield context: f_i = max(e_i - 1, 0).
inline std::vector<int> subfield_exponents(const SplittingProfile& pr) {
  std::vector<int> f;
  for (int e_i : pr.exps) f.push_back(std::max(e_i - 1, 0));
  return f;
}

// F: (+) Z/p^{f_i} -> (+) Z/p^{e_i}, componentwise multiplication by
// p^{e_i - f_i} (the inclusion of the index-p subgroup).
inline std::vector<int64_t> F_map(const SplittingProfile& pr,
                                  const std::vector<int64_t>& b) {
  auto f = subfield_exponents(pr);
  if (b.size() != f.size())
    fail(ErrorCode::WrongShape, "F_map: tuple length mismatch");
  std::vector<int64_t> a(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    int64_t q = ipow(pr.p, pr.exps[i]);
    a[i] = mod_reduce(b[i] * ipow(pr.p, pr.exps[i] - f[i]), q);
  }
  return a;
}

// pi: componentwise reduction to Z/p^{r_i}, r_i = min(e_i, 1).
inline std::vector<int64_t> pi_map(const SplittingProfile& pr,
                                   const std::vector<int64_t>& a) {
  if (a.size() != pr.exps.size())
    fail(ErrorCode::WrongShape, "pi_map: tuple length mismatch");
  std::vector<int64_t> c(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    c[i] = mod_reduce(a[i], ipow(pr.p, std::min(pr.exps[i], 1)));
  return c;
}

inline ShaComponent compute_sha_relative(const SplittingProfile& pr,
                                         const Limits& limits = {}) {
  return compute_sha_prime_power(derive_relative_profile(pr), limits);
}

// ---- full decomposition ------------------------------------------------------

struct ShaGroup {
  std::vector<ShaComponent> components;  // one per prime dividing the pivot
                                         // degree, ascending p

  // Canonical invariant factors of the direct sum: per-prime ascending chains
  // are aligned at their largest entries and multiplied across primes.
  std::vector<int64_t> invariant_factors() const {
    size_t len = 0;
    for (const auto& c : components)
      len = std::max(len, c.invariant_factors.size());
    std::vector<int64_t> out;
    for (size_t k = 0; k < len; ++k) {
      int64_t f = 1;
      for (const auto& c : components) {
        size_t n = c.invariant_factors.size();
        if (k + n >= len) f *= c.invariant_factors[k + n - len];
      }
      out.push_back(f);
    }
    return out;
  }

  BigInt order() const {
    BigInt r = 1;
    for (const auto& c : components) r *= c.sha_order();
    return r;
  }
  bool trivial() const { return order() == 1; }
};

namespace detail {
inline ShaComponent restore_caller_order(const ShaComponent& in,
                                         const std::vector<int>& original_index) {
  ShaComponent out = in;
  size_t m = original_index.size();
  out.ambient_exponents.assign(m, 0);
  for (auto& g : out.generators) g.assign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    out.ambient_exponents[original_index[i]] = in.ambient_exponents[i];
    for (size_t r = 0; r < in.generators.size(); ++r)
      out.generators[r][original_index[i]] = in.generators[r][i];
  }
  out.factor_order = original_index;
  return out;
}
}  // namespace detail

// Obstruction group of the product L with the given pivot factor: direct sum
// over primes p dividing the pivot degree of the group of the context whose
// pivot is the largest p-power-degree subfield, other factors unchanged.
inline ShaGroup compute_sha(const std::vector<AbelianFieldQ>& L,
                            size_t pivot_index, const Limits& limits = {}) {
  if (pivot_index >= L.size())
    fail(ErrorCode::ZeroInput, "pivot index out of range");
  const AbelianFieldQ& pivot = L[pivot_index];
  if (!pivot.is_quotient_cyclic())
    fail(ErrorCode::NoCyclicFactor, "designated pivot factor is not cyclic");
  std::vector<AbelianFieldQ> others;
  for (size_t i = 0; i < L.size(); ++i)
    if (i != pivot_index) others.push_back(L[i]);

  ShaGroup out;
  for (auto [p, k] : factorize64(pivot.degree())) {
    (void)k;
    auto ctx = make_context(pivot.p_part_subfield(p, limits), others, limits);
    auto comp = compute_sha_prime_power(build_profile(ctx), limits);
    out.components.push_back(
        detail::restore_caller_order(comp, ctx.original_index));
  }
  return out;
}

// ---- partition rendering (prime-degree pivots) -------------------------------

// For e = 1: elements of G seen as partitions (J_0, ..., J_{p-1}) of
// J = { i : e_i = 1 }, the factors whose local algebras are fields.
using Partition = std::vector<std::vector<int>>;

inline std::vector<Partition> partition_view(const SplittingProfile& pr,
                                             const Limits& limits = {}) {
  if (pr.e != 1)
    fail(ErrorCode::WrongExponent, "partition view requires e = 1");
  auto rows = enumerate_membership_group(pr, limits);
  std::vector<Partition> out;
  for (const auto& a : rows) {
    Partition part(static_cast<size_t>(pr.p));
    for (size_t i = 0; i < pr.exps.size(); ++i)
      if (pr.exps[i] == 1) part[a[i]].push_back(static_cast<int>(i));
    out.push_back(std::move(part));
  }
  return out;
}

// A partition is trivial when at most one block is nonempty (these correspond
// exactly to the diagonal subgroup).
inline bool partition_is_trivial(const Partition& part) {
  int nonempty = 0;
  for (const auto& block : part) nonempty += block.empty() ? 0 : 1;
  return nonempty <= 1;
}

}  // namespace multinorm
