#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

#include "multinorm/brauer.hpp"
#include "support.hpp"

using namespace multinorm;
using testsupport::make_rng;
using testsupport::rand_range;

namespace {

AbelianFieldQ quad(int64_t d) { return AbelianFieldQ::quad_field(d); }

std::vector<AbelianFieldQ> biquad_triple() {
  return {quad(13), quad(17), quad(221)};
}

Rational quad_norm(int64_t D, int64_t a, int64_t b) {
  return Rational(a * a - D * b * b);
}

template <class F>
void require_error(ErrorCode code, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("hasse invariant: quadratic field basics") {
  auto K = quad(13);
  // 17 is a square mod 13, so the symbol at 13 is trivial.
  CHECK(hasse_invariant(K, Rational(17), Place::at(13)).is_zero());
  // 2 is inert in Q(sqrt 13): the ledger of (K, 2) is 1/2 at 2 and at 13.
  auto led = build_ledger(K, Rational(2));
  CHECK(led.at(Place::at(2)) == QmodZ(1, 2));
  CHECK(led.at(Place::at(13)) == QmodZ(1, 2));
  CHECK(led.at(Place::infinity()).is_zero());
  CHECK(led.total().is_zero());
  // Entries are ordered: real place first, then primes ascending.
  REQUIRE(led.entries.size() == 3);
  CHECK(led.entries[0].first == Place::infinity());
  CHECK(led.entries[1].first == Place::at(2));
  CHECK(led.entries[2].first == Place::at(13));

  // Rationals never obstruct; zero input rejected.
  CHECK(hasse_invariant(AbelianFieldQ::rationals(), Rational(7),
                        Place::at(7)).is_zero());
  require_error(ErrorCode::ZeroInput,
                [&] { hasse_invariant(K, Rational(0), Place::at(2)); });
}

TEST_CASE("hasse invariant: explicit generator rescales but never unsplits") {
  auto K = AbelianFieldQ::cyclotomic_field(5);  // cyclic quartic, U(5) = <2> = <3>
  for (int64_t c : {2, 3, 7, 10, 30}) {
    for (const Place& v : invariant_support(K, Rational(c))) {
      auto a = hasse_invariant(K, Rational(c), v, 2);
      auto b = hasse_invariant(K, Rational(c), v, 3);
      CHECK(a.is_zero() == b.is_zero());
    }
  }
  // A non-generator is rejected.
  require_error(ErrorCode::ZeroInput, [&] {
    hasse_invariant(K, Rational(2), Place::at(2), 4);  // 4 has order 2 mod 5
  });
}

TEST_CASE("hasse invariant: constructed norms have trivial ledgers") {
  // cyclotomic_value(f, x) is the norm of x - zeta_f, hence a norm from every
  // subfield of Q(zeta_f).
  struct Case {
    AbelianFieldQ K;
    int64_t f;
  };
  std::vector<Case> cases = {
      {quad(13), 13},
      {AbelianFieldQ::cyclotomic_field(5), 5},
      {parse_field_spec("cyclosub:7:3"), 7},
      {parse_field_spec("explicit:16:15"), 16},
      {quad(-1), 4},
  };
  for (const auto& [K, f] : cases) {
    for (int64_t x : {2, 3, 5, 11}) {
      Rational c = cyclotomic_value(f, Rational(x));
      REQUIRE(c != 0);
      auto led = build_ledger(K, c);
      for (const auto& [v, inv] : led.entries) {
        INFO("field conductor " << K.conductor() << " c " << c << " at "
                                << v.str());
        CHECK(inv.is_zero());
      }
    }
  }
}

TEST_CASE("hasse invariant: randomized reciprocity") {
  auto rng = make_rng(601);
  std::vector<AbelianFieldQ> pool = {
      quad(13),
      quad(-3),
      quad(2),
      AbelianFieldQ::cyclotomic_field(5),
      parse_field_spec("cyclosub:7:3"),
      parse_field_spec("cyclosub:9:3"),
      parse_field_spec("explicit:16:15"),
      quad(-2),
  };
  for (int it = 0; it < 40; ++it) {
    const auto& K = pool[static_cast<size_t>(rand_range(rng, 0, 7))];
    int64_t num = rand_range(rng, 1, 9999);
    int64_t den = rand_range(rng, 1, 9999);
    int64_t sign = rand_range(rng, 0, 1) ? 1 : -1;
    Rational c(sign * num, den);
    // build_ledger aborts internally if reciprocity ever fails.
    auto led = build_ledger(K, c);
    CHECK(led.total().is_zero());
  }
}

TEST_CASE("local solvability: split factors and norms") {
  auto L = biquad_triple();
  LocalSolver solver(L);
  // 3 splits in Q(sqrt 13): every c is a local norm at 3.
  for (Rational c : {Rational(2, 7), Rational(-5), Rational(30), Rational(13)})
    CHECK(solver.solvable_at(c, Place::at(3)));
  // Actual norms from single factors are local norms everywhere.
  for (auto [D, a, b] :
       std::vector<std::array<int64_t, 3>>{{13, 4, 1}, {17, 5, 1}, {221, 15, 1}}) {
    Rational c = quad_norm(D, a, b);
    REQUIRE(c != 0);
    CHECK_FALSE(solver.first_failure(c).has_value());
  }
  // This triple is locally solvable everywhere for every c: each place class
  // has at least one completely split factor.
  int64_t checked = 0;
  for (int64_t h = 1; h <= 25; ++h)
    for (const Rational& c : Analyzer::rationals_of_height(h)) {
      auto r = locally_solvable_everywhere(L, c);
      CHECK(r.ok);
      CHECK_FALSE(r.witness.has_value());
      ++checked;
    }
  CHECK(checked > 300);
}

TEST_CASE("local solvability: failure with witness") {
  // Two copies of Q(sqrt 13): at v = 2 both are inert and 2 has odd
  // valuation, so 2 is not a product of local norms.
  std::vector<AbelianFieldQ> L = {quad(13), quad(13)};
  auto r = locally_solvable_everywhere(L, Rational(2));
  REQUIRE_FALSE(r.ok);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == Place::at(2));
  CHECK_FALSE(locally_solvable(L, Rational(2), Place::at(2)));
  CHECK(locally_solvable(L, Rational(3), Place::at(3)));
}

TEST_CASE("alpha on the biquadratic triple") {
  Analyzer an(biquad_triple(), 0);
  REQUIRE(an.sha().invariant_factors() == std::vector<int64_t>{2});

  // c = 1 and constructed multinorms have zero character.
  CHECK(an.alpha(Rational(1)).zero());
  auto rng = make_rng(602);
  for (int it = 0; it < 10; ++it) {
    Rational c = quad_norm(13, rand_range(rng, 1, 8), rand_range(rng, 1, 4)) *
                 quad_norm(17, rand_range(rng, 1, 8), rand_range(rng, 1, 4)) *
                 quad_norm(221, rand_range(rng, 15, 20), rand_range(rng, 1, 1));
    if (c == 0) continue;
    REQUIRE_FALSE(an.local_obstruction(c).has_value());
    auto ob = an.alpha(c);
    INFO("constructed multinorm " << c);
    CHECK(ob.zero());
    CHECK(an.decide(c).verdict == Verdict::Solvable);
  }

  // c = 5 is locally solvable everywhere but obstructed, with value 1/2.
  REQUIRE_FALSE(an.local_obstruction(Rational(5)).has_value());
  auto ob5 = an.alpha(Rational(5));
  REQUIRE(ob5.parts.size() == 1);
  CHECK(ob5.parts[0].p == 2);
  REQUIRE(ob5.parts[0].generator_values.size() == 1);
  CHECK(ob5.parts[0].generator_values[0] == QmodZ(1, 2));
  CHECK(an.decide(Rational(5)).verdict == Verdict::Obstructed);

  // 2 and 3 are unobstructed global multinorms; so are their inverses.
  for (Rational c : {Rational(2), Rational(3), Rational(1, 2), Rational(6)})
    CHECK(an.decide(c).verdict == Verdict::Solvable);

  // Additivity of the character.
  auto sum = an.alpha(Rational(10)).flat();
  auto lhs = an.alpha(Rational(5)).flat();
  auto rhs = an.alpha(Rational(2)).flat();
  REQUIRE(sum.size() == lhs.size());
  for (size_t i = 0; i < sum.size(); ++i) CHECK(sum[i] == lhs[i] + rhs[i]);
}

TEST_CASE("alpha is independent of the covering index choice") {
  // e = 1 context.
  auto ctx = make_context(quad(13), {quad(17), quad(221)});
  auto pr = build_profile(ctx);
  auto G = enumerate_membership_group(pr);
  for (Rational c : {Rational(5), Rational(2), Rational(-1), Rational(10, 3)}) {
    if (locally_solvable_everywhere({quad(13), quad(17), quad(221)}, c).ok) {
      for (const auto& a : G)
        CHECK(alpha_character_value(ctx, pr, c, a, false) ==
              alpha_character_value(ctx, pr, c, a, true));
    }
  }
  // e = 2 context: covering indices run mod 4.
  auto tctx = make_context(parse_field_spec("explicit:16:15"),
                           {quad(5), quad(2), quad(-1)});
  auto tpr = build_profile(tctx);
  auto tG = enumerate_membership_group(tpr);
  std::vector<AbelianFieldQ> tower = {parse_field_spec("explicit:16:15"),
                                      quad(5), quad(2), quad(-1)};
  int used = 0;
  for (Rational c : {Rational(-1), Rational(2), Rational(3), Rational(7),
                     Rational(41), Rational(1, 2), Rational(-7)}) {
    if (!locally_solvable_everywhere(tower, c).ok) continue;
    ++used;
    for (const auto& a : tG) {
      CHECK(alpha_character_value(tctx, tpr, c, a, false) ==
            alpha_character_value(tctx, tpr, c, a, true));
      // The character kills the diagonal.
    }
    std::vector<int64_t> diag = {1, 1, 1};
    for (size_t i = 0; i < diag.size(); ++i)
      diag[i] = mod_reduce(1, ipow(tpr.p, tpr.exps[i]));
    CHECK(alpha_character_value(tctx, tpr, c, diag).is_zero());
    CHECK(alpha_character_value(tctx, tpr, c,
                                std::vector<int64_t>(diag.size(), 0))
              .is_zero());
  }
  CHECK(used >= 3);
}

TEST_CASE("character pulled back along F matches the subfield character") {
  std::vector<AbelianFieldQ> tower = {parse_field_spec("explicit:16:15"),
                                      quad(5), quad(2), quad(-1)};
  const auto& K = tower[0];
  auto K0 = K.subfield_of_degree(K.degree() / 2);
  std::vector<AbelianFieldQ> others(tower.begin() + 1, tower.end());
  auto ctx = make_context(K, others);
  auto pr = build_profile(ctx);
  auto ctx0 = make_context(K0, others);
  auto pr0 = build_profile(ctx0);
  REQUIRE(ctx0.original_index == ctx.original_index);

  int64_t g = K.smallest_quotient_generator();
  auto G0 = enumerate_membership_group(pr0);
  std::vector<AbelianFieldQ> L0 = {K0, others[0], others[1], others[2]};
  int used = 0;
  for (Rational c : {Rational(-1), Rational(2), Rational(3), Rational(7),
                     Rational(41), Rational(1, 2), Rational(-7), Rational(9)}) {
    if (!locally_solvable_everywhere(tower, c).ok) continue;
    if (!locally_solvable_everywhere(L0, c).ok) continue;
    ++used;
    for (const auto& a0 : G0)
      CHECK(alpha_character_value(ctx, pr, c, F_map(pr, a0)) ==
            alpha_character_value(ctx0, pr0, c, a0, false, g));
  }
  CHECK(used >= 3);
}

TEST_CASE("decide: two factors never need the character") {
  Analyzer an({quad(13), quad(17)}, 0);
  CHECK(an.sha().trivial());
  int failures = 0, successes = 0;
  for (int64_t h = 1; h <= 10; ++h)
    for (const Rational& c : Analyzer::rationals_of_height(h)) {
      auto rep = an.decide(c);
      auto local = an.local_obstruction(c);
      if (local) {
        CHECK(rep.verdict == Verdict::NoLocalSolution);
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == *local);
        ++failures;
      } else {
        CHECK(rep.verdict == Verdict::Solvable);
        CHECK_FALSE(rep.obstruction.has_value());  // character skipped
        ++successes;
      }
    }
  CHECK(failures > 0);
  CHECK(successes > 0);
  // 5 is inert in both fields: the first failing c by scan order is 1/5,
  // witnessed at 5.
  auto rep = an.decide(Rational(5));
  CHECK(rep.verdict == Verdict::NoLocalSolution);
  CHECK(*rep.witness == Place::at(5));
}

TEST_CASE("decide: cyclotomic product needs only local checks") {
  std::vector<AbelianFieldQ> L = {AbelianFieldQ::cyclotomic_field(25),
                                  AbelianFieldQ::cyclotomic_field(15),
                                  AbelianFieldQ::cyclotomic_field(9)};
  Analyzer a0(L, 0);
  Analyzer a2(L, 2);
  REQUIRE(a0.sha().trivial());
  REQUIRE(a2.sha().trivial());
  for (Rational c : {Rational(2), Rational(7), Rational(1, 3), Rational(-4),
                     Rational(11)}) {
    auto r0 = a0.decide(c);
    auto r2 = a2.decide(c);
    CHECK(r0.verdict == r2.verdict);
    CHECK_FALSE(r0.obstruction.has_value());
    if (r0.witness || r2.witness) {
      REQUIRE(r0.witness.has_value());
      REQUIRE(r2.witness.has_value());
      CHECK(*r0.witness == *r2.witness);
    }
  }
}

TEST_CASE("decide: pivot independence on the biquadratic triple") {
  Analyzer a0(biquad_triple(), 0);
  Analyzer a1(biquad_triple(), 1);
  Analyzer a2(biquad_triple(), 2);
  for (int64_t h = 1; h <= 6; ++h)
    for (const Rational& c : Analyzer::rationals_of_height(h)) {
      auto v0 = a0.decide(c).verdict;
      CHECK(v0 == a1.decide(c).verdict);
      CHECK(v0 == a2.decide(c).verdict);
    }
}

TEST_CASE("decide: single factor and rationals pivot") {
  // Single cyclic factor: the Hasse norm theorem case.
  Analyzer an({quad(13)}, 0);
  CHECK(an.sha().trivial());
  CHECK(an.decide(Rational(3)).verdict == Verdict::Solvable);  // 3 = 16 - 13
  auto rep = an.decide(Rational(5));
  CHECK(rep.verdict == Verdict::NoLocalSolution);
  CHECK(*rep.witness == Place::at(5));

  // Q as pivot: everything is a norm from the Q factor.
  Analyzer aq({AbelianFieldQ::rationals(), quad(13)}, 0);
  CHECK(aq.sha().trivial());
  for (Rational c : {Rational(5), Rational(-7, 3), Rational(2)})
    CHECK(aq.decide(c).verdict == Verdict::Solvable);

  require_error(ErrorCode::ZeroInput, [&] { an.decide(Rational(0)); });
  require_error(ErrorCode::ZeroInput,
                [&] { Analyzer(biquad_triple(), 5); });
}

TEST_CASE("knot group representatives") {
  // Trivial group: empty list, complete immediately.
  auto empty = knot_group({quad(13), quad(17)}, 0, 10);
  CHECK(empty.reps.empty());
  CHECK(empty.complete);
  CHECK(empty.group_order == 1);

  // The biquadratic triple: one representative generates the dual of Z/2.
  // All characters through height 4 vanish; at height 5 the scan hits 1/5
  // (positives ascending), whose character is the nontrivial one.
  auto rep = knot_group(biquad_triple(), 0, 10);
  CHECK(rep.complete);
  CHECK(rep.group_order == 2);
  REQUIRE(rep.reps.size() == 1);
  CHECK(rep.reps[0].c == Rational(1, 5));
  auto flat = rep.reps[0].character.flat();
  REQUIRE(flat.size() == 1);
  CHECK(flat[0] == QmodZ(1, 2));

  // A bound too small to reach height 5 reports partial coverage.
  auto partial = knot_group(biquad_triple(), 0, 4);
  CHECK_FALSE(partial.complete);
  CHECK(partial.reps.empty());
  CHECK(partial.scanned > 0);

  // Character additivity on the found representative.
  Analyzer an(biquad_triple(), 0);
  Rational c = rep.reps[0].c;
  auto twice = an.alpha(c * c).flat();
  for (const auto& v : twice) CHECK(v.is_zero());
}

TEST_CASE("analyzer group matches the standalone decomposition") {
  for (size_t pivot = 0; pivot < 3; ++pivot) {
    Analyzer an(biquad_triple(), pivot);
    auto direct = compute_sha(biquad_triple(), pivot);
    CHECK(an.sha().invariant_factors() == direct.invariant_factors());
    CHECK(an.sha().order() == direct.order());
  }
  // Sextic pivots: two prime components, only p = 2 contributes.
  auto c7 = parse_field_spec("cyclosub:7:3");
  auto c9 = parse_field_spec("cyclosub:9:3");
  auto c13 = parse_field_spec("cyclosub:13:3");
  std::vector<AbelianFieldQ> L = {quad(13).compositum(c7),
                                  quad(17).compositum(c9),
                                  quad(221).compositum(c13)};
  Analyzer an(L, 0);
  CHECK(an.sha().invariant_factors() == std::vector<int64_t>{2});
  // The obstructed region is governed by the quadratic parts: 5 is again
  // locally solvable with nonzero character.
  if (!an.local_obstruction(Rational(5))) {
    auto ob = an.alpha(Rational(5));
    CHECK_FALSE(ob.zero());
    CHECK(an.decide(Rational(5)).verdict == Verdict::Obstructed);
  }
}
