#pragma once

// Independent cross-checks for the multinorm machinery.
//
//  * norm_solution_search: a bounded exhaustive search for global solutions of
//    N_{L/Q}(t) = c when every factor of L is Q or a quadratic field.  It works
//    over the box of tuples (x_i + y_i*sqrt(D_i))/den_i with |x_i|,|y_i| below
//    the bound and den_i in {1,2} (half-integer coordinates occur only for
//    D ≡ 1 mod 4, where the ring of integers is Z[(1+sqrt(D))/2]).  A reported
//    solution is verified exactly before it is returned; an empty result means
//    only that the box contains no solution.
//
//  * spot_check_profile: re-derives splitting data for a batch of unramified
//    primes straight from single-field local degrees (decomposition-group
//    orders computed by coset enumeration) and compares it with the stored
//    class exponents, which were produced by the composite-group machinery.
//    The two routes share no code beyond basic modular arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "multinorm/abelian_q.hpp"
#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"
#include "multinorm/splitting.hpp"

namespace multinorm {

// One coordinate of a solution tuple: the element x + y*sqrt(D) of the
// corresponding factor.  D = 0 marks a rationals factor, whose "element" is
// just the rational x (and whose norm is x itself).
struct NormWitness {
  int64_t D = 0;
  Rational x = 0;
  Rational y = 0;

  Rational norm() const {
    if (D == 0) return x;
    return x * x - Rational(D) * y * y;
  }
};

struct SearchReport {
  bool found = false;
  std::vector<NormWitness> witness;  // one entry per factor when found
  int64_t checks = 0;                // representability subproblems examined
};

namespace detail {

inline std::optional<int64_t> perfect_sqrt(int64_t n) {
  if (n < 0) return std::nullopt;
  auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  if (r * r == n) return r;
  return std::nullopt;
}

// The squarefree D with K = Q(sqrt(D)), recovered from the conductor.
inline int64_t quadratic_radicand(const AbelianFieldQ& K) {
  int64_t f = K.conductor();
  std::vector<int64_t> candidates;
  for (int64_t s : {int64_t{1}, int64_t{-1}}) {
    candidates.push_back(s * f);
    if (f % 4 == 0) candidates.push_back(s * (f / 4));
  }
  for (int64_t d : candidates) {
    if (d == 0 || d == 1) continue;
    bool squarefree = true;
    for (auto [q, a] : factorize64(d < 0 ? -d : d))
      if (a > 1) squarefree = false;
    if (!squarefree) continue;
    if (AbelianFieldQ::quad_field(d).same_field(K)) return d;
  }
  fail(ErrorCode::Internal, "no squarefree radicand matches the quadratic field");
}

// Representability of the integer u by the quadratic norm form.
//   whole = true : u = x^2 - D y^2 with integers |x|,|y| <= bound.
//   whole = false: u = a^2 - D b^2 with odd integers |a|,|b| <= bound,
//                  i.e. u/4 is the norm of the half-integral (a + b sqrt(D))/2.
// Exact local rejections cut most candidates before the scan; the scan itself
// is complete for the stated coordinate box.
class NormFormTable {
 public:
  explicit NormFormTable(int64_t bound) : bound_(bound) {}

  std::optional<std::pair<int64_t, int64_t>> represent(int64_t D, int64_t u,
                                                       bool whole,
                                                       int64_t* checks) {
    auto key = std::make_tuple(D, u, whole);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (checks) ++*checks;
    auto out = solve(D, u, whole);
    memo_.emplace(key, out);
    return out;
  }

 private:
  std::optional<std::pair<int64_t, int64_t>> solve(int64_t D, int64_t u,
                                                   bool whole) const {
    if (u == 0) return std::nullopt;  // norms of nonzero elements only
    if (D < 0 && u < 0) return std::nullopt;
    int64_t au = u < 0 ? -u : u;
    // At an odd ramified prime the form is a square times D y^2, so u must be
    // a square modulo p whenever p does not divide it.
    for (auto [p, a] : factorize64(D < 0 ? -D : D)) {
      if (p == 2) continue;
      if (au % p != 0 && kronecker(u, p) == -1) return std::nullopt;
    }
    // At an odd inert prime every local norm has even valuation.
    for (auto [q, a] : factorize64(au)) {
      if (q == 2 || D % q == 0) continue;
      if (a % 2 == 1 && kronecker(D, q) == -1) return std::nullopt;
    }
    const __int128 cap = static_cast<__int128>(bound_) * bound_;
    if (whole) {
      for (int64_t y = 0; y <= bound_; ++y) {
        __int128 t = static_cast<__int128>(u) + static_cast<__int128>(D) * y * y;
        if (D < 0 && t < 0) break;
        if (D > 0 && t > cap) break;  // x would leave the coordinate box
        if (t < 0 || t > cap) continue;
        if (auto x = perfect_sqrt(static_cast<int64_t>(t)))
          return std::make_pair(*x, y);
      }
      return std::nullopt;
    }
    // Half-integral coordinates exist only for D ≡ 1 mod 4, and a^2 - D b^2
    // with a, b odd is automatically ≡ 1 - D ≡ 0 mod 4.
    if (mod_reduce(D, 4) != 1) return std::nullopt;
    if (mod_reduce(u, 4) != 0) return std::nullopt;
    for (int64_t b = 1; b <= bound_; b += 2) {
      __int128 t = static_cast<__int128>(u) + static_cast<__int128>(D) * b * b;
      if (D < 0 && t < 0) break;
      if (D > 0 && t > cap) break;
      if (t < 0 || t > cap) continue;
      if (auto a = perfect_sqrt(static_cast<int64_t>(t))) {
        if (*a % 2 == 1) return std::make_pair(*a, b);
      }
    }
    return std::nullopt;
  }

  int64_t bound_;
  std::map<std::tuple<int64_t, int64_t, bool>, std::optional<std::pair<int64_t, int64_t>>>
      memo_;
};

// Signed divisors of R in deterministic order: ascending absolute value,
// positive before negative.
inline std::vector<int64_t> signed_divisors(int64_t R) {
  std::vector<int64_t> ds = divisors(R < 0 ? -R : R);
  std::sort(ds.begin(), ds.end());
  std::vector<int64_t> out;
  out.reserve(2 * ds.size());
  for (int64_t d : ds) {
    out.push_back(d);
    out.push_back(-d);
  }
  return out;
}

}  // namespace detail

// Bounded exhaustive search for a tuple t with prod_i N_i(t_i) = c.  Factors
// must be Q or quadratic (UnsupportedDegree otherwise).  The search box is
// documented at the top of this header; the first solution in a fixed
// deterministic order is returned.  found = false is a statement about the
// box, never a proof that no solution exists.
inline SearchReport norm_solution_search(const std::vector<AbelianFieldQ>& L,
                                         const Rational& c, int64_t bound) {
  if (L.empty()) fail(ErrorCode::ZeroInput, "no factors given");
  if (c == 0) fail(ErrorCode::ZeroInput, "c must be a nonzero rational");
  if (bound < 1) fail(ErrorCode::ZeroInput, "search bound must be positive");
  for (const auto& K : L)
    if (K.degree() > 2)
      fail(ErrorCode::UnsupportedDegree,
           "solution search handles only rational and quadratic factors");

  SearchReport report;

  // A rationals factor absorbs any target exactly.
  for (size_t i = 0; i < L.size(); ++i) {
    if (!L[i].is_rationals()) continue;
    report.found = true;
    for (size_t j = 0; j < L.size(); ++j) {
      NormWitness w;
      if (j == i) {
        w.D = 0;
        w.x = c;
      } else if (L[j].is_rationals()) {
        w.D = 0;
        w.x = 1;
      } else {
        w.D = detail::quadratic_radicand(L[j]);
        w.x = 1;
      }
      report.witness.push_back(w);
    }
    return report;
  }

  size_t m = L.size();
  std::vector<int64_t> D(m);
  for (size_t i = 0; i < m; ++i) D[i] = detail::quadratic_radicand(L[i]);

  detail::NormFormTable table(bound);

  // Denominator patterns, in lexicographic order with 1 before 2.  den = 2 is
  // possible only where half-integral coordinates exist.
  std::vector<int> dens(m, 1);
  std::vector<std::pair<int64_t, int64_t>> parts(m);
  bool done = false;
  while (!done && !report.found) {
    bool feasible = true;
    for (size_t i = 0; i < m; ++i)
      if (dens[i] == 2 && mod_reduce(D[i], 4) != 1) feasible = false;
    if (feasible) {
      Rational target = c;
      for (size_t i = 0; i < m; ++i) target *= dens[i] * dens[i];
      if (boost::multiprecision::denominator(target) == 1) {
        BigInt Cb = boost::multiprecision::numerator(target);
        BigInt abs = Cb < 0 ? -Cb : Cb;
        if (abs > BigInt(int64_t{1} << 62))
          fail(ErrorCode::ModulusTooLarge, "search target exceeds 2^62");
        int64_t C = static_cast<int64_t>(Cb);

        // Assign an integer u_i = den_i^2 * N_i(t_i) to each factor so that
        // the product is C; each u_i must divide the remaining quotient.
        std::vector<int64_t> u(m);
        auto assign = [&](auto&& self, size_t i, int64_t R) -> bool {
          if (i + 1 == m) {
            auto w = table.represent(D[i], R, dens[i] == 1, &report.checks);
            if (!w) return false;
            u[i] = R;
            parts[i] = *w;
            return true;
          }
          for (int64_t t : detail::signed_divisors(R)) {
            if (R % t != 0) continue;
            auto w = table.represent(D[i], t, dens[i] == 1, &report.checks);
            if (!w) continue;
            u[i] = t;
            parts[i] = *w;
            if (self(self, i + 1, R / t)) return true;
          }
          return false;
        };
        if (assign(assign, 0, C)) {
          report.found = true;
          for (size_t i = 0; i < m; ++i) {
            NormWitness w;
            w.D = D[i];
            w.x = Rational(parts[i].first, dens[i]);
            w.y = Rational(parts[i].second, dens[i]);
            report.witness.push_back(w);
          }
        }
      }
    }
    // next denominator pattern
    size_t k = m;
    while (k > 0 && dens[k - 1] == 2) dens[--k] = 1;
    if (k == 0)
      done = true;
    else
      dens[k - 1] = 2;
  }

  if (report.found) {
    Rational prod = 1;
    for (const auto& w : report.witness) prod *= w.norm();
    if (prod != c) fail(ErrorCode::Internal, "witness product mismatch");
  }
  return report;
}

struct SpotCheckReport {
  int64_t requested = 0;      // batch size asked for
  int64_t checked = 0;        // primes actually verified
  int64_t largest_prime = 0;  // last prime in the batch (0 when empty)
};

// Verify the stored class exponents of a splitting profile against local
// degrees recomputed from scratch, over the first `budget` primes not
// dividing the composite modulus.  For an unramified q the exponent of
// factor i must satisfy
//     p^{e_i} = [E_i,q : K_i,q] = localdeg(K*K_i, q) / localdeg(K_i, q)
// and the pivot entry p^{pivot_exp} = localdeg(K, q).  Any disagreement is a
// Mismatch naming the offending prime.
inline SpotCheckReport spot_check_profile(const Context& ctx,
                                          const SplittingProfile& pr,
                                          int64_t budget) {
  if (budget < 0) fail(ErrorCode::ZeroInput, "budget must be nonnegative");
  size_t m = ctx.factors.size();
  if (pr.exps.size() != m || pr.p != ctx.p)
    fail(ErrorCode::Mismatch, "profile shape disagrees with the context");

  SpotCheckReport report;
  report.requested = budget;
  if (budget == 0) return report;

  int64_t avoid = 1;
  for (auto [q, b] : ctx.G->modulus_factors()) avoid *= q;

  std::vector<AbelianFieldQ> composita;
  composita.reserve(m);
  for (size_t i = 0; i < m; ++i)
    composita.push_back(ctx.pivot.compositum(ctx.factors[i], ctx.limits));

  for (int64_t q : primes_avoiding(static_cast<int>(budget), avoid)) {
    Place v = Place::at(q);
    size_t id = class_of_place(ctx, pr, v);
    if (id >= pr.classes.size())
      fail(ErrorCode::Mismatch, "no class for prime " + std::to_string(q));
    const PlaceClass& cls = pr.classes[id];
    if (cls.exps.size() != m)
      fail(ErrorCode::Mismatch, "class width off at prime " + std::to_string(q));

    int64_t oK = ctx.pivot.local_degree(v);
    if (ipow(ctx.p, cls.pivot_exp) != oK)
      fail(ErrorCode::Mismatch,
           "pivot local degree off at prime " + std::to_string(q));
    for (size_t i = 0; i < m; ++i) {
      int64_t top = composita[i].local_degree(v);
      int64_t bot = ctx.factors[i].local_degree(v);
      if (top % bot != 0)
        fail(ErrorCode::Internal, "local degree of a subfield does not divide");
      if (ipow(ctx.p, cls.exps[i]) != top / bot)
        fail(ErrorCode::Mismatch, "factor " + std::to_string(i) +
                                      " exponent off at prime " + std::to_string(q));
    }
    ++report.checked;
    report.largest_prime = q;
  }
  return report;
}

}  // namespace multinorm
