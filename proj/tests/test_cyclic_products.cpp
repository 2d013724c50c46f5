#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "multinorm/cyclic_products.hpp"
#include "support.hpp"

using namespace multinorm;
using testsupport::make_rng;
using testsupport::rand_range;

namespace {

AbelianFieldQ quad(int64_t d) { return AbelianFieldQ::quad_field(d); }

template <class F>
void require_error(ErrorCode code, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

// A bicyclic degree-9 field whose local degrees are all <= 3: the cubic in
// Q(zeta_9) composed with the cubic in Q(zeta_73).  73 = 1 mod 9 makes the
// Frobenius at 73 trivial on the first part, and 3^12 = 1 mod 73 makes 3 a
// cube, so the Frobenius at 3 is trivial on the second part.
AbelianFieldQ bicubic_field() {
  return parse_field_spec("cyclosub:9:3")
      .compositum(parse_field_spec("cyclosub:73:3"));
}

}  // namespace

TEST_CASE("degree-p subfields of a bicyclic field") {
  auto F2 = quad(13).compositum(quad(17));
  auto subs = degree_p_subfields(F2, 2);
  REQUIRE(subs.size() == 3);
  CHECK(subs[0].same_field(quad(13)));
  CHECK(subs[1].same_field(quad(17)));
  CHECK(subs[2].same_field(quad(221)));

  auto F3 = bicubic_field();
  REQUIRE(F3.degree() == 9);
  auto cubs = degree_p_subfields(F3, 3);
  REQUIRE(cubs.size() == 4);
  std::set<int64_t> conductors;
  for (const auto& K : cubs) {
    CHECK(K.degree() == 3);
    CHECK(K.is_subfield_of(F3));
    conductors.insert(K.conductor());
  }
  CHECK(conductors == std::set<int64_t>{9, 73, 657});

  require_error(ErrorCode::WrongShape,
                [&] { degree_p_subfields(quad(13), 2); });
  require_error(ErrorCode::WrongShape,
                [&] { degree_p_subfields(F2, 3); });
  require_error(ErrorCode::NotPrimeDegree,
                [&] { degree_p_subfields(F2, 4); });
  // A cyclic quartic field has one quadratic subfield, not p + 1.
  require_error(ErrorCode::WrongShape, [&] {
    degree_p_subfields(AbelianFieldQ::cyclotomic_field(5), 2);
  });
}

TEST_CASE("prime case: the biquadratic triple") {
  auto rep = sha_prime_case({quad(13), quad(17), quad(221)});
  CHECK(rep.p == 2);
  REQUIRE(rep.nonzero);
  CHECK(rep.rank == 1);
  CHECK(rep.invariant_factors() == std::vector<int64_t>{2});
  REQUIRE(rep.overfield.has_value());
  CHECK(rep.overfield->conductor() == 221);
  CHECK(rep.overfield->degree() == 4);
  // Certificate: local degrees at infinity, 13, 17 are all <= 2.
  REQUIRE(rep.local_degrees.size() == 3);
  CHECK(rep.local_degrees[0].first == Place::infinity());
  for (const auto& [v, d] : rep.local_degrees) {
    (void)v;
    CHECK(d <= 2);
  }
}

TEST_CASE("prime case: zero branches") {
  // Two factors: always zero.
  auto two = sha_prime_case({quad(13), quad(17)});
  CHECK_FALSE(two.nonzero);
  CHECK(two.rank == 0);

  // Four or more distinct quadratics: zero regardless of arithmetic.
  auto four = sha_prime_case({quad(13), quad(17), quad(221), quad(5)});
  CHECK_FALSE(four.nonzero);
  CHECK(four.factors.size() == 4);

  // No common overfield: the third field is outside the compositum of the
  // first two, so there is no certificate at all.
  auto apart = sha_prime_case({quad(13), quad(17), quad(5)});
  CHECK_FALSE(apart.nonzero);
  CHECK_FALSE(apart.overfield.has_value());

  // Common overfield but a ramified place of full local degree: 13 is inert
  // in Q(sqrt 5), so the decomposition group at 13 is the whole Klein group.
  auto big = sha_prime_case({quad(13), quad(5), quad(65)});
  CHECK_FALSE(big.nonzero);
  REQUIRE(big.overfield.has_value());
  int64_t at13 = 0;
  for (const auto& [v, d] : big.local_degrees)
    if (!v.infinite && v.p == 13) at13 = d;
  CHECK(at13 == 4);

  // Duplicates are removed before counting.
  auto dup = sha_prime_case({quad(13), quad(13), quad(17)});
  CHECK(dup.factors.size() == 2);
  CHECK_FALSE(dup.nonzero);

  require_error(ErrorCode::NotPrimeDegree, [&] {
    sha_prime_case({quad(13), parse_field_spec("cyclosub:7:3")});
  });
  require_error(ErrorCode::NotPrimeDegree,
                [&] { sha_prime_case({AbelianFieldQ::cyclotomic_field(5)}); });
  require_error(ErrorCode::ZeroInput, [&] { sha_prime_case({}); });
}

TEST_CASE("prime case: a cubic family with nonzero group") {
  auto F = bicubic_field();
  auto cubs = degree_p_subfields(F, 3);
  auto rep = sha_prime_case(cubs);
  REQUIRE(rep.nonzero);
  CHECK(rep.p == 3);
  CHECK(rep.rank == 2);
  CHECK(rep.invariant_factors() == std::vector<int64_t>{3, 3});
  for (const auto& [v, d] : rep.local_degrees) {
    (void)v;
    CHECK(d <= 3);
  }
  // The general pipeline agrees, for every choice of pivot.
  for (size_t pivot = 0; pivot < 4; ++pivot)
    CHECK(compute_sha(cubs, pivot).invariant_factors() ==
          std::vector<int64_t>{3, 3});

  // Any three of the four subfields give rank 1.
  for (size_t drop = 0; drop < 4; ++drop) {
    std::vector<AbelianFieldQ> three;
    for (size_t i = 0; i < 4; ++i)
      if (i != drop) three.push_back(cubs[i]);
    auto r3 = sha_prime_case(three);
    REQUIRE(r3.nonzero);
    CHECK(r3.rank == 1);
    CHECK(compute_sha(three, 0).invariant_factors() ==
          std::vector<int64_t>{3});
  }
}

TEST_CASE("cyclic products: closed form vs pipeline") {
  // Single cyclic field: trivial.
  auto single = sha_product_cyclic({AbelianFieldQ::cyclotomic_field(5)});
  CHECK(single.vanishes);
  CHECK(single.group.trivial());
  CHECK(single.nonzero_primes.empty());
  REQUIRE(single.prime_cases.size() == 1);
  CHECK(single.prime_cases[0].p == 2);

  // The biquadratic triple.
  auto triple = sha_product_cyclic({quad(13), quad(17), quad(221)});
  CHECK_FALSE(triple.vanishes);
  CHECK(triple.nonzero_primes == std::vector<int64_t>{2});
  CHECK(triple.group.invariant_factors() == std::vector<int64_t>{2});

  // Sextic factors: the quadratic parts carry the group, the cubic parts are
  // spread over incompatible conductors and contribute nothing.
  std::vector<AbelianFieldQ> sextic = {
      quad(13).compositum(parse_field_spec("cyclosub:7:3")),
      quad(17).compositum(parse_field_spec("cyclosub:9:3")),
      quad(221).compositum(parse_field_spec("cyclosub:13:3"))};
  auto sx = sha_product_cyclic(sextic);
  CHECK_FALSE(sx.vanishes);
  CHECK(sx.nonzero_primes == std::vector<int64_t>{2});
  REQUIRE(sx.prime_cases.size() == 2);
  CHECK(sx.prime_cases[0].p == 2);
  CHECK(sx.prime_cases[0].nonzero);
  CHECK(sx.prime_cases[0].rank == 1);
  CHECK(sx.prime_cases[1].p == 3);
  CHECK_FALSE(sx.prime_cases[1].nonzero);
  CHECK(sx.group.invariant_factors() == std::vector<int64_t>{2});

  // Four distinct quadratics: the Hasse principle holds.
  auto four = sha_product_cyclic({quad(13), quad(17), quad(221), quad(5)});
  CHECK(four.vanishes);
  CHECK(four.group.trivial());

  // Duplicated factors collapse consistently in both routes.
  auto dup2 = sha_product_cyclic({quad(13), quad(13), quad(17)});
  CHECK(dup2.vanishes);
  auto dup3 = sha_product_cyclic({quad(13), quad(13), quad(17), quad(221)});
  CHECK_FALSE(dup3.vanishes);
  CHECK(dup3.group.invariant_factors() == std::vector<int64_t>{2});

  // The bicubic family through the product interface.
  auto cubs = degree_p_subfields(bicubic_field(), 3);
  auto cp = sha_product_cyclic(cubs);
  CHECK_FALSE(cp.vanishes);
  CHECK(cp.nonzero_primes == std::vector<int64_t>{3});
  CHECK(cp.group.invariant_factors() == std::vector<int64_t>{3, 3});

  // Non-cyclic factors are rejected: the closed form has no route for them.
  require_error(ErrorCode::NonCyclic, [&] {
    sha_product_cyclic({AbelianFieldQ::cyclotomic_field(25),
                        AbelianFieldQ::cyclotomic_field(15),
                        AbelianFieldQ::cyclotomic_field(9)});
  });
  require_error(ErrorCode::ZeroInput, [&] { sha_product_cyclic({}); });
}

TEST_CASE("replacing factors by subfields never grows the group") {
  auto rng = make_rng(701);
  std::vector<AbelianFieldQ> pool2 = {
      parse_field_spec("cyclosub:5:4"),
      parse_field_spec("cyclosub:13:4"),
      parse_field_spec("explicit:16:15"),
      quad(13),
      quad(17),
      quad(-1),
      quad(2),
  };
  std::vector<AbelianFieldQ> pool3 = {
      parse_field_spec("cyclosub:9:3"),  parse_field_spec("cyclosub:7:3"),
      parse_field_spec("cyclosub:13:3"), parse_field_spec("cyclosub:73:3"),
      parse_field_spec("cyclosub:19:9"), parse_field_spec("cyclosub:27:9"),
  };
  for (int64_t p : {2, 3}) {
    const auto& pool = p == 2 ? pool2 : pool3;
    for (int it = 0; it < 12; ++it) {
      std::vector<AbelianFieldQ> Ks, Ns;
      for (int j = 0; j < 3; ++j) {
        const auto& K =
            pool[static_cast<size_t>(rand_range(rng, 0, (int64_t)pool.size() - 1))];
        Ks.push_back(K);
        int64_t e = valuation(K.degree(), p);
        int64_t f = rand_range(rng, 0, e);
        Ns.push_back(f == 0 ? AbelianFieldQ::rationals()
                            : K.subfield_of_degree(ipow(p, f)));
      }
      BigInt big = compute_sha(Ks, 0).order();
      BigInt small = compute_sha(Ns, 0).order();
      INFO("p=" << p << " iteration " << it);
      CHECK(big % small == 0);
    }
  }
}

TEST_CASE("explicit map on the biquadratic overfield") {
  auto F = quad(13).compositum(quad(17));
  auto subs = degree_p_subfields(F, 2);
  Analyzer an(subs, 0);
  REQUIRE(an.sha().invariant_factors() == std::vector<int64_t>{2});

  auto f1 = example_map_f(F, subs, Rational(1));
  CHECK_FALSE(f1.vacuous);
  CHECK(f1.p == 2);
  REQUIRE(f1.values.size() == 1);
  CHECK(f1.zero());

  // 5 is locally solvable everywhere but not a multinorm: the map sees it.
  auto f5 = example_map_f(F, subs, Rational(5));
  CHECK(f5.values == std::vector<int64_t>{1});
  // 2 is a multinorm.
  CHECK(example_map_f(F, subs, Rational(2)).zero());

  // Agreement with the decision procedure over a height scan.
  for (int64_t h = 1; h <= 50; ++h)
    for (const Rational& c : Analyzer::rationals_of_height(h)) {
      auto fm = example_map_f(F, subs, c);
      auto verdict = an.decide(c).verdict;
      INFO("c = " << c);
      CHECK(verdict != Verdict::NoLocalSolution);
      CHECK(fm.zero() == (verdict == Verdict::Solvable));
    }

  // The map is additive.
  auto rng = make_rng(702);
  for (int it = 0; it < 30; ++it) {
    Rational c1(rand_range(rng, 1, 60), rand_range(rng, 1, 30));
    Rational c2(rand_range(rng, 1, 60), rand_range(rng, 1, 30));
    if (rand_range(rng, 0, 1)) c1 = -c1;
    auto fa = example_map_f(F, subs, c1);
    auto fb = example_map_f(F, subs, c2);
    auto fc = example_map_f(F, subs, c1 * c2);
    for (size_t i = 0; i < fc.values.size(); ++i)
      CHECK(fc.values[i] == mod_reduce(fa.values[i] + fb.values[i], 2));
  }
}

TEST_CASE("explicit map on the bicubic overfield") {
  auto F = bicubic_field();
  auto subs = degree_p_subfields(F, 3);
  Analyzer an(subs, 0);
  REQUIRE(an.sha().order() == 9);

  bool saw_nonzero = false;
  for (int64_t h = 1; h <= 12; ++h)
    for (const Rational& c : Analyzer::rationals_of_height(h)) {
      auto fm = example_map_f(F, subs, c);
      REQUIRE_FALSE(fm.vacuous);
      REQUIRE(fm.values.size() == 2);
      auto verdict = an.decide(c).verdict;
      INFO("c = " << c);
      CHECK(verdict != Verdict::NoLocalSolution);
      CHECK(fm.zero() == (verdict == Verdict::Solvable));
      saw_nonzero = saw_nonzero || !fm.zero();
    }
  CHECK(saw_nonzero);

  // Additivity mod 3.
  auto rng = make_rng(703);
  for (int it = 0; it < 20; ++it) {
    Rational c1(rand_range(rng, 1, 40), rand_range(rng, 1, 20));
    Rational c2(rand_range(rng, 1, 40), rand_range(rng, 1, 20));
    auto fa = example_map_f(F, subs, c1);
    auto fb = example_map_f(F, subs, c2);
    auto fc = example_map_f(F, subs, c1 * c2);
    for (size_t i = 0; i < fc.values.size(); ++i)
      CHECK(fc.values[i] == mod_reduce(fa.values[i] + fb.values[i], 3));
  }
}

TEST_CASE("explicit map: vacuous and malformed inputs") {
  // The compositum of the two cubics of conductors 7 and 9 has local degree 9
  // at 3, so the whole group is trivial and the map is vacuous.
  auto F = parse_field_spec("cyclosub:7:3")
               .compositum(parse_field_spec("cyclosub:9:3"));
  auto subs = degree_p_subfields(F, 3);
  auto fm = example_map_f(F, subs, Rational(2));
  CHECK(fm.vacuous);
  CHECK(fm.values.empty());
  // And indeed the group vanishes.
  CHECK(compute_sha(subs, 0).trivial());

  auto F2 = quad(13).compositum(quad(17));
  auto qsubs = degree_p_subfields(F2, 2);
  require_error(ErrorCode::WrongShape, [&] {
    example_map_f(F2, {qsubs[0], qsubs[1]}, Rational(2));
  });
  require_error(ErrorCode::WrongShape, [&] {
    example_map_f(F2, {qsubs[0], qsubs[1], quad(5)}, Rational(2));
  });
  require_error(ErrorCode::WrongShape, [&] {
    example_map_f(F2, {qsubs[0], qsubs[0], qsubs[1]}, Rational(2));
  });
  require_error(ErrorCode::WrongShape,
                [&] { example_map_f(quad(13), qsubs, Rational(2)); });
  require_error(ErrorCode::ZeroInput,
                [&] { example_map_f(F2, qsubs, Rational(0)); });
}
