#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"

namespace multinorm {

// A place of Q: a finite prime or the real place.
struct Place {
  bool infinite = false;
  int64_t p = 0;

  static Place at(int64_t prime) { return {false, prime}; }
  static Place infinity() { return {true, 0}; }

  friend bool operator==(const Place&, const Place&) = default;
  friend auto operator<=>(const Place& a, const Place& b) {
    // Real place sorts first.
    if (a.infinite != b.infinite) return a.infinite ? std::strong_ordering::less
                                                    : std::strong_ordering::greater;
    return a.p <=> b.p;
  }

  std::string str() const { return infinite ? "infty" : std::to_string(p); }
};

namespace detail {

// Greedy small generating set for a multiplicatively closed residue set.
inline std::vector<int64_t> find_generators(const std::set<int64_t>& elements,
                                            int64_t m) {
  std::vector<int64_t> gens;
  std::unordered_set<int64_t> span = {1 % m};
  std::vector<int64_t> frontier;
  for (int64_t x : elements) {
    if (span.count(x)) continue;
    gens.push_back(x);
    frontier.assign(span.begin(), span.end());
    while (!frontier.empty()) {
      int64_t y = frontier.back();
      frontier.pop_back();
      for (int64_t g : gens) {
        int64_t z = mulmod(y, g, m);
        if (span.insert(z).second) frontier.push_back(z);
      }
    }
  }
  return gens;
}

inline std::set<int64_t> close_under_products(const std::vector<int64_t>& gens,
                                              int64_t m) {
  std::set<int64_t> seen = {1 % m};
  std::vector<int64_t> frontier = {1 % m};
  while (!frontier.empty()) {
    int64_t x = frontier.back();
    frontier.pop_back();
    for (int64_t g : gens) {
      int64_t y = mulmod(x, mod_reduce(g, m), m);
      if (seen.insert(y).second) frontier.push_back(y);
    }
  }
  return seen;
}

}  // namespace detail

// An abelian extension of Q in conductor-subgroup form: the fixed field of
// H <= (Z/fZ)^x acting on Q(zeta_f), stored with f minimal (the conductor).
class AbelianFieldQ {
 public:
  // Field cut out by the subgroup generated by `gens` inside (Z/NZ)^x.
  static AbelianFieldQ from_raw(int64_t N, std::vector<int64_t> gens,
                                const Limits& limits = {}) {
    if (N <= 0) fail(ErrorCode::ZeroInput, "modulus must be positive");
    if (N > limits.modulus_limit)
      fail(ErrorCode::ModulusTooLarge,
           "modulus " + std::to_string(N) + " exceeds limit " +
               std::to_string(limits.modulus_limit));
    for (int64_t& g : gens) {
      g = mod_reduce(g, N);
      if (std::gcd(g, N) != 1)
        fail(ErrorCode::ZeroInput,
             "subgroup generator " + std::to_string(g) +
                 " is not a unit mod " + std::to_string(N));
    }
    return AbelianFieldQ(N, detail::close_under_products(gens, N), limits);
  }

  static AbelianFieldQ from_subgroup_elements(int64_t N, std::set<int64_t> elems,
                                              const Limits& limits = {}) {
    return AbelianFieldQ(N, std::move(elems), limits);
  }

  static AbelianFieldQ rationals() { return from_raw(1, {}); }

  // Q(sqrt(D)) for squarefree D; D = 1 gives Q itself.
  static AbelianFieldQ quad_field(int64_t D, const Limits& limits = {}) {
    if (D == 0) fail(ErrorCode::ZeroInput, "quad: D must be nonzero");
    for (auto [p, e] : factorize64(D < 0 ? -D : D))
      if (e > 1)
        fail(ErrorCode::ZeroInput,
             "quad: " + std::to_string(D) + " is not squarefree");
    if (D == 1) return rationals();
    int64_t disc = (mod_reduce(D, 4) == 1) ? D : 4 * D;
    int64_t N = disc < 0 ? -disc : disc;
    if (N > limits.modulus_limit)
      fail(ErrorCode::ModulusTooLarge, "quad: discriminant too large");
    std::set<int64_t> H;
    for (int64_t x = 1; x < N; ++x) {
      if (std::gcd(x, N) != 1) continue;
      if (kronecker(disc, x) == 1) H.insert(x);
    }
    if (N == 1) H = {0};
    return AbelianFieldQ(N, std::move(H), limits);
  }

  static AbelianFieldQ cyclotomic_field(int64_t N, const Limits& limits = {}) {
    return from_raw(N, {}, limits);
  }

  // Unique degree-d subfield of Q(zeta_N); error if absent or ambiguous.
  static AbelianFieldQ cyclotomic_subfield(int64_t N, int64_t d,
                                           const Limits& limits = {});

  int64_t conductor() const { return modulus_; }
  int64_t degree() const { return degree_; }
  const std::set<int64_t>& subgroup_elements() const { return elements_; }
  const std::vector<int64_t>& subgroup_generators() const { return gens_; }
  bool is_rationals() const { return degree_ == 1; }

  bool contains(int64_t x) const {
    return elements_.count(mod_reduce(x, modulus_)) != 0;
  }

  bool same_field(const AbelianFieldQ& o) const {
    return modulus_ == o.modulus_ && elements_ == o.elements_;
  }

  // Lexicographic key used to order and deduplicate fields.
  std::pair<int64_t, std::vector<int64_t>> sort_key() const {
    return {modulus_, std::vector<int64_t>(elements_.begin(), elements_.end())};
  }

  // ---- quotient group  (Z/fZ)^x / H  = Gal(F/Q) ----------------------------

  // Order of the coset xH in the quotient.
  int64_t coset_order(int64_t x) const {
    x = mod_reduce(x, modulus_);
    if (std::gcd(x, modulus_) != 1)
      fail(ErrorCode::Internal, "coset_order: not a unit");
    int64_t y = x;
    for (int64_t k = 1;; ++k) {
      if (contains(y)) return k;
      y = mulmod(y, x, modulus_);
      if (k > degree_) fail(ErrorCode::Internal, "coset_order runaway");
    }
  }

  bool cosets_equal(int64_t x, int64_t y) const {
    x = mod_reduce(x, modulus_);
    y = mod_reduce(y, modulus_);
    if (modulus_ == 1) return true;
    return contains(mulmod(x, invmod(y, modulus_), modulus_));
  }

  bool is_quotient_cyclic() const {
    int64_t exp = 1;
    for (int64_t g : unit_group_generators(modulus_))
      exp = std::lcm(exp, coset_order(g));
    return exp == degree_;
  }

  // Smallest unit residue whose coset generates the (cyclic) quotient.
  int64_t smallest_quotient_generator() const {
    if (degree_ == 1) return mod_reduce(1, modulus_);
    if (!is_quotient_cyclic())
      fail(ErrorCode::NonCyclic, "quotient group is not cyclic");
    for (int64_t x = 2; x < modulus_; ++x) {
      if (std::gcd(x, modulus_) != 1) continue;
      if (coset_order(x) == degree_) return x;
    }
    fail(ErrorCode::Internal, "no quotient generator found");
  }

  // j with xH = g^j H (0 <= j < coset_order(g)).
  int64_t quotient_dlog(int64_t x, int64_t g) const {
    x = mod_reduce(x, modulus_);
    if (modulus_ == 1) return 0;
    int64_t cur = 1;
    int64_t ord = coset_order(g);
    for (int64_t j = 0; j < ord; ++j) {
      if (cosets_equal(x, cur)) return j;
      cur = mulmod(cur, mod_reduce(g, modulus_), modulus_);
    }
    fail(ErrorCode::Internal, "dlog: element outside cyclic span");
  }

  // ---- field operations -----------------------------------------------------

  bool is_subfield_of(const AbelianFieldQ& bigger) const {
    if (bigger.modulus_ % modulus_ != 0) return false;
    for (int64_t g : bigger.gens_)
      if (!contains(g)) return false;
    return true;
  }

  AbelianFieldQ compositum(const AbelianFieldQ& o, const Limits& limits = {}) const {
    int64_t L = std::lcm(modulus_, o.modulus_);
    if (L > limits.modulus_limit)
      fail(ErrorCode::ModulusTooLarge, "compositum modulus exceeds limit");
    std::set<int64_t> H;
    for (int64_t x = 0; x < L; ++x) {
      if (std::gcd(x, L) != 1 && L > 1) continue;
      if (contains(x) && o.contains(x)) H.insert(mod_reduce(x, L));
    }
    return AbelianFieldQ(L, std::move(H), limits);
  }

  AbelianFieldQ intersection(const AbelianFieldQ& o, const Limits& limits = {}) const {
    int64_t L = std::lcm(modulus_, o.modulus_);
    if (L > limits.modulus_limit)
      fail(ErrorCode::ModulusTooLarge, "intersection modulus exceeds limit");
    // The intersection corresponds to the subgroup generated by the full
    // preimages of both subgroups mod L; kernel generators make any unit lift
    // of the stored generators valid.
    std::vector<int64_t> all;
    for (int64_t g : gens_) all.push_back(lift_unit(g, modulus_, L));
    for (int64_t g : o.gens_) all.push_back(lift_unit(g, o.modulus_, L));
    for (int64_t g : reduction_kernel_generators(L, modulus_)) all.push_back(g);
    for (int64_t g : reduction_kernel_generators(L, o.modulus_)) all.push_back(g);
    return AbelianFieldQ(L, detail::close_under_products(all, L), limits);
  }

  // Subfield of degree d; requires a cyclic quotient and d | degree.
  AbelianFieldQ subfield_of_degree(int64_t d, const Limits& limits = {}) const {
    if (d <= 0 || degree_ % d != 0)
      fail(ErrorCode::BadDegree,
           "no subfield of degree " + std::to_string(d) + " in degree " +
               std::to_string(degree_));
    if (d == 1) return rationals();
    if (d == degree_) return *this;
    if (!is_quotient_cyclic())
      fail(ErrorCode::NonCyclic, "subfield_of_degree needs a cyclic quotient");
    int64_t g = smallest_quotient_generator();
    int64_t gd = powmod(g, d, modulus_);
    std::vector<int64_t> gens = gens_;
    gens.push_back(gd);
    return AbelianFieldQ(modulus_, detail::close_under_products(gens, modulus_),
                         limits);
  }

  // Largest subfield of p-power degree (for cyclic fields).
  AbelianFieldQ p_part_subfield(int64_t p, const Limits& limits = {}) const {
    int64_t d = 1;
    int64_t n = degree_;
    while (n % p == 0) { d *= p; n /= p; }
    return subfield_of_degree(d, limits);
  }

  // ---- local data -----------------------------------------------------------

  // Residue representing Frobenius at p: CRT(1 mod p^a, p mod m).
  int64_t frobenius_residue(int64_t p) const {
    if (modulus_ == 1) return 0;
    int a = modulus_ % p == 0 ? valuation(modulus_, p) : 0;
    int64_t pa = ipow(p, a);
    int64_t m = modulus_ / pa;
    if (m == 1) return mod_reduce(1, modulus_);
    if (pa == 1) return mod_reduce(p, modulus_);
    return crt_pair(1, pa, mod_reduce(p, m), m);
  }

  // Components of global inertia generators at p, where A >= v_p(modulus) is
  // the valuation used for the shared ambient group (Z/p^A Z)^x.
  std::vector<int64_t> inertia_residues(int64_t p, int A) const {
    int a = modulus_ % p == 0 ? valuation(modulus_, p) : 0;
    int64_t pa = ipow(p, a);
    int64_t m = modulus_ / pa;
    std::vector<int64_t> out;
    for (int64_t g : unit_group_generators_prime_power(p, A)) {
      int64_t gp = mod_reduce(g, pa);
      out.push_back(m == 1 ? gp : (pa == 1 ? mod_reduce(1, modulus_)
                                           : crt_pair(gp, pa, 1, m)));
    }
    return out;
  }

  int64_t infinity_residue() const {
    return modulus_ <= 2 ? mod_reduce(1, modulus_) : modulus_ - 1;
  }

  // Image of the local Artin map at the place v evaluated at c, as a unit
  // residue mod the conductor.  Convention: for finite p with modulus p^a * m
  // and c = p^val * u,  t = CRT(u^{-1} mod p^a, p^val mod m); at the real
  // place, t = -1 for c < 0 and 1 otherwise.
  int64_t local_artin_residue(const Place& v, const Rational& c) const {
    if (c == 0) fail(ErrorCode::ZeroInput, "Artin symbol of 0");
    if (modulus_ == 1) return 0;
    if (v.infinite) return c < 0 ? infinity_residue() : mod_reduce(1, modulus_);
    int64_t p = v.p;
    int a = modulus_ % p == 0 ? valuation(modulus_, p) : 0;
    int64_t pa = ipow(p, a);
    int64_t m = modulus_ / pa;
    BigInt num = boost::multiprecision::numerator(c);
    BigInt den = boost::multiprecision::denominator(c);
    int val = 0;
    while (num % p == 0) { num /= p; ++val; }
    while (den % p == 0) { den /= p; --val; }
    // Unit part u = num/den; t = u^{-1} = den/num mod p^a.
    int64_t t_p = 1;
    if (pa > 1) {
      int64_t n_red = mod_reduce(num, pa);
      int64_t d_red = mod_reduce(den, pa);
      t_p = mulmod(d_red, invmod(n_red, pa), pa);
    }
    int64_t t_m = 1;
    if (m > 1) {
      int64_t pm = mod_reduce(p, m);
      t_m = val >= 0 ? powmod(pm, val, m) : powmod(invmod(pm, m), -val, m);
    }
    if (pa == 1) return mod_reduce(t_m, modulus_);
    if (m == 1) return mod_reduce(t_p, modulus_);
    return crt_pair(t_p, pa, t_m, m);
  }

  // Order of the decomposition group's image in the quotient = local degree.
  int64_t local_degree(const Place& v) const {
    if (modulus_ == 1) return 1;
    std::vector<int64_t> reps = {mod_reduce(1, modulus_)};
    std::vector<int64_t> gens;
    if (v.infinite) {
      gens.push_back(infinity_residue());
    } else {
      gens.push_back(frobenius_residue(v.p));
      int a = modulus_ % v.p == 0 ? valuation(modulus_, v.p) : 0;
      for (int64_t g : inertia_residues(v.p, std::max(a, 1))) gens.push_back(g);
    }
    // BFS over quotient cosets reached from the identity.
    std::vector<int64_t> frontier = reps;
    while (!frontier.empty()) {
      int64_t x = frontier.back();
      frontier.pop_back();
      for (int64_t g : gens) {
        int64_t y = mulmod(x, g, modulus_);
        bool known = false;
        for (int64_t r : reps)
          if (cosets_equal(y, r)) { known = true; break; }
        if (!known) {
          reps.push_back(y);
          frontier.push_back(y);
        }
      }
    }
    return static_cast<int64_t>(reps.size());
  }

  // Residue order of Frobenius at an unramified prime q (= local degree).
  int64_t unramified_order(int64_t q) const {
    if (modulus_ % q == 0)
      fail(ErrorCode::Internal, "unramified_order at ramified prime");
    if (modulus_ == 1) return 1;
    return coset_order(mod_reduce(q, modulus_));
  }

 private:
  AbelianFieldQ(int64_t N, std::set<int64_t> elems, const Limits& limits) {
    if (N == 1) elems = {0};
    if (N == 2) elems = {1};
    // Canonicalize: smallest divisor N' of N such that the reduction kernel
    // lies inside the subgroup; then the field is defined mod N'.
    int64_t f = N;
    for (int64_t d : divisors(N)) {
      bool ok = true;
      for (int64_t k : reduction_kernel_generators(N, d))
        if (!elems.count(k)) { ok = false; break; }
      if (ok) { f = d; break; }
    }
    std::set<int64_t> reduced;
    for (int64_t x : elems) reduced.insert(mod_reduce(x, f));
    modulus_ = f;
    elements_ = std::move(reduced);
    degree_ = euler_phi(f) / static_cast<int64_t>(elements_.size());
    gens_ = detail::find_generators(elements_, f);
    (void)limits;
  }

  static int64_t lift_unit(int64_t g, int64_t from, int64_t to) {
    // A unit mod `to` congruent to g mod `from` (from | to).
    if (from == 1 || from == to) return from == to ? g : 1;
    for (int64_t k = 0; k < to / from; ++k) {
      int64_t cand = g + k * from;
      if (std::gcd(cand, to) == 1) return cand;
    }
    fail(ErrorCode::Internal, "lift_unit failed");
  }

  int64_t modulus_ = 1;
  int64_t degree_ = 1;
  std::set<int64_t> elements_;
  std::vector<int64_t> gens_;
};

// ---- cyclotomic_subfield ----------------------------------------------------

namespace detail {

// All homomorphisms V -> Z/d for a small multiplicative group V given by
// coset representatives; each hom is returned as a map element -> value.
struct SmallQuotient {
  int64_t modulus;                     // residues live mod this
  std::vector<int64_t> reps;           // coset representatives of V
  mutable std::unordered_map<int64_t, int> index_of;  // residue -> coset index
  const std::set<int64_t>* base;       // subgroup U^d (cosets of it form V)

  int canon(int64_t x) const {
    // Index of the coset containing x.
    auto it = index_of.find(x);
    if (it != index_of.end()) return it->second;
    for (size_t i = 0; i < reps.size(); ++i) {
      int64_t diff = mulmod(x, invmod(reps[i], modulus), modulus);
      if (base->count(diff)) {
        index_of.emplace(x, static_cast<int>(i));
        return static_cast<int>(i);
      }
    }
    fail(ErrorCode::Internal, "coset not found");
  }
};

}  // namespace detail

inline AbelianFieldQ AbelianFieldQ::cyclotomic_subfield(int64_t N, int64_t d,
                                                        const Limits& limits) {
  if (N <= 0 || d <= 0) fail(ErrorCode::ZeroInput, "cyclosub: bad arguments");
  if (N > limits.modulus_limit)
    fail(ErrorCode::ModulusTooLarge, "cyclosub: modulus exceeds limit");
  int64_t phi = euler_phi(N);
  if (phi % d != 0)
    fail(ErrorCode::BadDegree, "cyclosub: " + std::to_string(d) +
                                   " does not divide phi(N) = " +
                                   std::to_string(phi));
  if (d == 1) return rationals();

  // Index-d subgroups of U = (Z/N)^x all contain U^d.  Work in V = U / U^d.
  auto ugens = unit_group_generators(N);
  std::vector<int64_t> dgens;
  for (int64_t g : ugens) dgens.push_back(powmod(g, d, N));
  std::set<int64_t> Ud = detail::close_under_products(dgens, N);

  int64_t vsize = phi / static_cast<int64_t>(Ud.size());
  if (N <= 2) vsize = 1;
  if (vsize % d != 0)
    fail(ErrorCode::BadDegree, "cyclosub: no subgroup of index " +
                                   std::to_string(d));
  if (vsize > 20000)
    fail(ErrorCode::AmbientTooLarge, "cyclosub: quotient too large");

  // Enumerate V's cosets.
  detail::SmallQuotient V;
  V.modulus = N;
  V.base = &Ud;
  V.reps.push_back(1 % N);
  {
    std::vector<int64_t> frontier = {1 % N};
    while (!frontier.empty()) {
      int64_t x = frontier.back();
      frontier.pop_back();
      for (int64_t g : ugens) {
        int64_t y = mulmod(x, g, N);
        bool found = false;
        for (int64_t r : V.reps) {
          if (Ud.count(mulmod(y, invmod(r, N), N))) { found = true; break; }
        }
        if (!found) {
          V.reps.push_back(y);
          frontier.push_back(y);
        }
      }
    }
  }
  if (static_cast<int64_t>(V.reps.size()) != vsize)
    fail(ErrorCode::Internal, "cyclosub: quotient enumeration mismatch");

  // Generators of V: greedy over reps.
  std::vector<int> gen_idx;
  {
    std::set<int> span = {V.canon(1 % N)};
    for (size_t i = 0; i < V.reps.size(); ++i) {
      if (span.count(static_cast<int>(i))) continue;
      gen_idx.push_back(static_cast<int>(i));
      std::vector<int> frontier(span.begin(), span.end());
      while (!frontier.empty()) {
        int x = frontier.back();
        frontier.pop_back();
        for (int gi : gen_idx) {
          int y = V.canon(mulmod(V.reps[x], V.reps[gi], N));
          if (span.insert(y).second) frontier.push_back(y);
        }
      }
    }
  }

  // All homs V -> Z/d by brute force on generator images, validated by
  // propagation over the full multiplication table.
  int r = static_cast<int>(gen_idx.size());
  double cand_count = 1;
  for (int i = 0; i < r; ++i) cand_count *= static_cast<double>(d);
  if (cand_count > 300000)
    fail(ErrorCode::AmbientTooLarge, "cyclosub: too many candidate characters");

  int n = static_cast<int>(V.reps.size());
  // Precompute multiplication-by-generator tables.
  std::vector<std::vector<int>> mul_gen(r, std::vector<int>(n));
  for (int gi = 0; gi < r; ++gi)
    for (int x = 0; x < n; ++x)
      mul_gen[gi][x] = V.canon(mulmod(V.reps[x], V.reps[gen_idx[gi]], N));

  std::vector<std::vector<int>> homs;  // each: value per coset index
  std::vector<int64_t> choice(r, 0);
  int id_idx = V.canon(1 % N);
  for (;;) {
    // Try to propagate this choice into a full hom.
    std::vector<int> val(n, -1);
    val[id_idx] = 0;
    std::vector<int> frontier = {id_idx};
    bool ok = true;
    while (ok && !frontier.empty()) {
      int x = frontier.back();
      frontier.pop_back();
      for (int gi = 0; gi < r; ++gi) {
        int y = mul_gen[gi][x];
        int want = static_cast<int>((val[x] + choice[gi]) % d);
        if (val[y] == -1) {
          val[y] = want;
          frontier.push_back(y);
        } else if (val[y] != want) {
          ok = false;
          break;
        }
      }
    }
    if (ok) homs.push_back(val);
    // Next candidate.
    int i = 0;
    for (; i < r; ++i) {
      if (++choice[i] < d) break;
      choice[i] = 0;
    }
    if (i == r) break;
  }
  if (static_cast<int64_t>(homs.size()) != vsize)
    fail(ErrorCode::Internal, "cyclosub: character count mismatch");

  // Subgroups of order exactly d of the character group, by closure BFS.
  auto add_homs = [&](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = (a[i] + b[i]) % static_cast<int>(d);
    return c;
  };
  std::set<std::vector<int>> all_homs(homs.begin(), homs.end());
  std::set<std::set<std::vector<int>>> seen_subgroups;
  std::vector<std::set<std::vector<int>>> stack;
  std::set<std::vector<int>> trivial = {std::vector<int>(n, 0)};
  stack.push_back(trivial);
  seen_subgroups.insert(trivial);
  std::vector<std::set<std::vector<int>>> order_d;
  while (!stack.empty()) {
    auto S = stack.back();
    stack.pop_back();
    if (static_cast<int64_t>(S.size()) == d) {
      order_d.push_back(S);
      if (order_d.size() >= 2) break;
      continue;
    }
    for (const auto& h : all_homs) {
      if (S.count(h)) continue;
      // Closure of S + h.
      std::set<std::vector<int>> T = S;
      std::vector<std::vector<int>> fr = {h};
      T.insert(h);
      while (!fr.empty()) {
        auto x = fr.back();
        fr.pop_back();
        for (const auto& s : std::vector<std::vector<int>>(T.begin(), T.end())) {
          auto y = add_homs(x, s);
          if (T.insert(y).second) fr.push_back(y);
        }
      }
      if (static_cast<int64_t>(T.size()) > d) continue;
      if (seen_subgroups.insert(T).second) stack.push_back(T);
    }
  }

  if (order_d.empty())
    fail(ErrorCode::BadDegree, "cyclosub: no degree-" + std::to_string(d) +
                                   " subfield of Q(zeta_" + std::to_string(N) +
                                   ")");
  if (order_d.size() > 1)
    fail(ErrorCode::BadDegree, "cyclosub: degree-" + std::to_string(d) +
                                   " subfield of Q(zeta_" + std::to_string(N) +
                                   ") is not unique");

  // H = preimage of the joint kernel of the chosen character subgroup.
  const auto& W = order_d.front();
  std::set<int64_t> H;
  for (int64_t x = 0; x < N; ++x) {
    if (std::gcd(x, N) != 1 && N > 1) continue;
    int idx = V.canon(mod_reduce(x, N));
    bool in_kernel = true;
    for (const auto& h : W)
      if (h[idx] != 0) { in_kernel = false; break; }
    if (in_kernel) H.insert(mod_reduce(x, N));
  }
  auto out = AbelianFieldQ(N, std::move(H), limits);
  if (out.degree() != d)
    fail(ErrorCode::Internal, "cyclosub: constructed degree mismatch");
  return out;
}

// ---- field-spec parsing -----------------------------------------------------

// Forms: quad:D | cyclosub:N:d | explicit:N:g1,g2,...
inline AbelianFieldQ parse_field_spec(const std::string& spec,
                                      const Limits& limits = {}) {
  auto bad = [&](const std::string& why) -> AbelianFieldQ {
    fail(ErrorCode::ZeroInput, "bad field spec '" + spec + "': " + why);
  };
  auto parse_int = [&](const std::string& s) -> int64_t {
    if (s.empty()) bad("empty integer");
    size_t pos = 0;
    int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (...) {
      bad("cannot parse integer '" + s + "'");
    }
    if (pos != s.size()) bad("trailing junk in integer '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  size_t start = 0;
  for (size_t i = 0; i <= spec.size(); ++i) {
    if (i == spec.size() || spec[i] == ':') {
      parts.push_back(spec.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.empty()) bad("empty");
  if (parts[0] == "quad") {
    if (parts.size() != 2) bad("quad takes one argument");
    return AbelianFieldQ::quad_field(parse_int(parts[1]), limits);
  }
  if (parts[0] == "cyclosub") {
    if (parts.size() != 3) bad("cyclosub takes two arguments");
    return AbelianFieldQ::cyclotomic_subfield(parse_int(parts[1]),
                                              parse_int(parts[2]), limits);
  }
  if (parts[0] == "explicit") {
    if (parts.size() != 3) bad("explicit takes modulus and generator list");
    int64_t N = parse_int(parts[1]);
    std::vector<int64_t> gens;
    std::string cur;
    for (size_t i = 0; i <= parts[2].size(); ++i) {
      if (i == parts[2].size() || parts[2][i] == ',') {
        if (!cur.empty()) gens.push_back(parse_int(cur));
        cur.clear();
      } else {
        cur += parts[2][i];
      }
    }
    return AbelianFieldQ::from_raw(N, gens, limits);
  }
  return bad("unknown form '" + parts[0] + "'");
}

}  // namespace multinorm
