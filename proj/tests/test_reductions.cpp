#include <doctest.h>

#include <type_traits>

#include "support.hpp"
#include "wopbench/error.hpp"
#include "wopbench/reductions.hpp"

using namespace wopbench;
using testsupport::q;

namespace {

OrderRef Q() { return make_order(LinearOrder::rationals()); }

OmegaSequence seq(const OrderRef& x, std::vector<OmegaTerm> head) {
    return {x, Stream<OmegaTerm>([head, x](std::size_t i) {
                return i < head.size() ? head[i] : OmegaTerm(x, {});
            })};
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::ParseError;
}

Element entry(long j, long second, long den, long fourth) {
    return Element::tuple({Element::integer(j), Element::integer(second), Element::rational(1, static_cast<unsigned long>(den)),
                           Element::integer(fourth)});
}

EnumerationStream constant_enum(std::uint64_t v) {
    return {Stream<std::uint64_t>([v](std::size_t) { return v; })};
}

}  // namespace

TEST_CASE("wop_to_ort color examples") {
    const auto x = Q();
    const Element qv = q(5), r = q(1);
    CHECK(first_difference_color(OmegaTerm(x, {{2, qv}, {1, r}}), OmegaTerm(x, {{2, qv}})) == 2);
    CHECK(first_difference_color(OmegaTerm(x, {{3, qv}}), OmegaTerm(x, {{2, qv}})) == 0);
    CHECK(first_difference_color(OmegaTerm(x, {{3, q(1, 2)}}), OmegaTerm(x, {{3, q(1, 3)}})) == 1);

    const auto img = wop_to_ort_forward(seq(x, {OmegaTerm(x, {{2, qv}, {1, r}}), OmegaTerm(x, {{2, qv}})}));
    CHECK(img.instance.coloring(0, 1) == 2);
    // Reverse chain: 0 is the top.
    CHECK(img.instance.poset.lt(1, 0));
}

TEST_CASE("wop_to_ort images are right-ordered and monotone") {
    for (const char* order : {"Q", "Z*", "composite"}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            GenParams p{2};
            p.order = order;
            const auto ci = gen_certified_instance(ProblemTag::WopOmega, seed, p);
            const auto& sigma = std::get<OmegaSequence>(ci.instance);
            const auto img = wop_to_ort_forward(sigma);
            CHECK(validate_right_ordered(img.instance.poset, img.instance.coloring, 80).ok);
            bool mono = true;
            std::size_t longest = 0;
            for (std::size_t i = 0; i < 40; ++i) {
                longest = std::max(longest, sigma.terms.at(i).length());
                for (std::size_t j = i + 1; j < 40; ++j) {
                    for (std::size_t k = j + 1; k < 40; ++k) {
                        mono = mono && img.instance.coloring(i, k) <= img.instance.coloring(i, j);
                    }
                }
            }
            CHECK(mono);
            CHECK(longest <= img.context.poset_size());
        }
    }
}

TEST_CASE("wop_to_ort backward") {
    const auto x = Q();
    // Shared exponent, descending coefficient: every pair has color 1.
    OmegaSequence flat{x, Stream<OmegaTerm>([x](std::size_t i) {
                           return OmegaTerm(x, {{1, Element::rational(1, static_cast<unsigned long>(i + 1))}});
                       })};
    Stream<std::size_t> h([](std::size_t i) { return 2 * i + 1; });
    const auto out = wop_to_ort_backward(flat, h);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(out.at(i).value == Element::rational(1, static_cast<unsigned long>(2 * i + 2)));
        CHECK(out.at(i).term == 2 * i + 1);
    }

    OmegaSequence jump = seq(x, {OmegaTerm(x, {{3, q(1)}}), OmegaTerm(x, {{2, q(1)}})});
    Stream<std::size_t> naturals([](std::size_t i) { return i; });
    CHECK(code_of([&] { wop_to_ort_backward(jump, naturals).at(0); }) == ErrorCode::EvenColor);
    // The parity mutation accepts the even color instead.
    CHECK_NOTHROW(wop_to_ort_backward(jump, naturals, BackwardMutation::ParityFlip).at(0));
}

TEST_CASE("ort product") {
    const std::vector<FinitePoset> two{FinitePoset::chain(2), FinitePoset::chain(2)};
    const auto prod = product_poset(two);
    CHECK(prod.size() == 4);
    // Componentwise order on {0,1}^2: 4 reflexive, 4 covering, (0,0) <= (1,1).
    CHECK(prod.related_pairs() == 9);
    const std::vector<std::size_t> sizes{2, 3};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            const std::vector<std::size_t> parts{a, b};
            const auto code = encode_product_color(sizes, parts);
            CHECK(code == a * 3 + b);
            CHECK(decode_product_color(sizes, code) == parts);
        }
    }

    OrtInstance one{FinitePoset::chain(3), ColoringStream(3, [](std::size_t i, std::size_t j) { return std::min<std::size_t>(2, j - i - 1); })};
    const auto same = ort_product_forward({one});
    CHECK(same.poset == one.poset);
    for (std::size_t j = 1; j < 10; ++j) CHECK(same.coloring(0, j) == one.coloring(0, j));

    OrtInstance c0{FinitePoset::chain(2), ColoringStream(2, [](std::size_t, std::size_t) { return 1; })};
    OrtInstance c1{FinitePoset::chain(3), ColoringStream(3, [](std::size_t, std::size_t) { return 2; })};
    const auto pc = ort_product_forward({c0, c1});
    CHECK(pc.coloring(3, 8) == 5);
    CHECK(validate_right_ordered(pc.poset, pc.coloring, 30).ok);

    Stream<std::size_t> h([](std::size_t i) { return i * i; });
    const auto copies = ort_product_backward(h, 2);
    REQUIRE(copies.size() == 2);
    CHECK(copies[0].take(5) == copies[1].take(5));
    CHECK(copies[1].take(4) == std::vector<std::size_t>{0, 1, 4, 9});
}

TEST_CASE("ort stage engine with one constant color") {
    OrtInstance inst{FinitePoset::chain(1), ColoringStream(1, [](std::size_t, std::size_t) { return 0; })};
    OrtStageEngine eng(inst);
    // Hand simulation: the only color improves at every stage using k = i - 1.
    const std::vector<std::size_t> previous{0, 0, 1, 2, 3};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(eng.improvement(1, i));
        CHECK(eng.previous(1, i) == previous[i]);
        if (i >= 1) CHECK(eng.witness(1, i) == i - 1);
    }
    CHECK(eng.entry(1, 0) == Element::tuple({Element::integer(1), Element::integer(1), Element::rational(Rational(2)),
                                             Element::integer(-1)}));
    CHECK(eng.entry(1, 3) == entry(1, 1, 3, -1));
}

TEST_CASE("ort stage zero row") {
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto ci = gen_certified_instance(ProblemTag::Ort, 5, GenParams{n});
        OrtStageEngine eng(std::get<OrtInstance>(ci.instance));
        std::vector<Element> expected;
        for (std::size_t j = n; j >= 1; --j) {
            expected.push_back(Element::tuple({Element::integer(static_cast<std::int64_t>(j)), Element::integer(1),
                                               Element::rational(Rational(2)), Element::integer(-1)}));
        }
        CHECK(eng.row(0).entries() == expected);
    }
}

TEST_CASE("sigma streams descend and keep columns separated") {
    for (std::size_t n = 2; n <= 4; ++n) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            CAPTURE(n);
            CAPTURE(seed);
            const auto ci = gen_certified_instance(ProblemTag::Ort, seed, GenParams{n});
            const auto img = ort_to_ectwop_forward(std::get<OrtInstance>(ci.instance));
            CHECK(validate_descending(img.sigma, 300).ok);
            const auto& eng = *img.engine;
            const auto& x = *eng.order();
            bool separated = true;
            for (std::size_t i = 0; i < 60; i += 3) {
                for (std::size_t i2 = 0; i2 < 60; i2 += 5) {
                    for (std::size_t j = 2; j <= n; ++j) {
                        for (std::size_t j2 = 1; j2 < j; ++j2) separated = separated && x.less(eng.entry(j2, i2), eng.entry(j, i));
                    }
                }
            }
            CHECK(separated);
            for (std::size_t i = 1; i < 100; ++i) {
                for (std::size_t j = 1; j <= n; ++j) {
                    CHECK(eng.previous(j, i - 1) <= eng.previous(j, i));
                    CHECK(eng.improvement(j, i) == eng.witness(j, i).has_value());
                    CHECK(img.improvements[j - 1].at(i) == (eng.improvement(j, i) ? 1u : 0u));
                }
            }
        }
    }
}

TEST_CASE("extraction parameters") {
    const std::vector<std::uint64_t> bounds{3, 1};
    const auto p = ExtractionParams::from_bounds(2, bounds);
    CHECK(p.n0 == 3);
    CHECK(p.m == 10);
    CHECK(p.f(0) == 12);
    CHECK(p.f(1) == 14);
    CHECK(ExtractionParams::from_bounds(2, bounds, BackwardMutation::StrideOffByOne).f(1) == 13);
    CHECK(code_of([&] { ExtractionParams::from_bounds(3, bounds); }) == ErrorCode::ParamsOutOfRange);

    Stream<Drawn> fifth([](std::size_t) { return Drawn{entry(1, 1, 5, -1), 0}; });
    CHECK(ort_to_ectwop_backward(2, bounds, fifth).at(0) == 4);
    Stream<Drawn> index([](std::size_t i) { return Drawn{entry(1, 1, static_cast<long>(i + 1), -1), i}; });
    const auto y = ort_to_ectwop_backward(2, bounds, index);
    CHECK(y.take(3) == std::vector<std::size_t>{12, 14, 16});
}

TEST_CASE("lex to omega examples") {
    const auto x = Q();
    const LexTuple row({q(7), q(3)});
    const auto t = lex_to_omega_term(x, row);
    CHECK(t.length() == 4);
    REQUIRE(t.pairs().size() == 2);
    CHECK(t.pairs()[0].exponent == 2);
    CHECK(t.pairs()[0].coefficient == q(7));
    CHECK(t.pairs()[1].exponent == 1);
    CHECK(t.pairs()[1].coefficient == q(3));
    const auto single = lex_to_omega_term(x, LexTuple({q(1, 2)}));
    REQUIRE(single.pairs().size() == 1);
    CHECK(single.pairs()[0].exponent == 1);
    const Drawn d{q(3), 4};
    Stream<Drawn> s([d](std::size_t) { return d; });
    CHECK(lex_to_omega_backward(s).at(9) == d);
}

TEST_CASE("lex to omega is an order embedding") {
    Rng rng(21);
    const auto x = Q();
    bool ok = true;
    for (int k = 0; k < 10000; ++k) {
        const std::size_t n = 1 + rng.below(5);
        std::vector<Element> a, b;
        for (std::size_t c = 0; c < n; ++c) {
            a.push_back(testsupport::small_rational(rng));
            // Share a prefix often so later columns decide.
            b.push_back(rng.chance(1, 2) ? a.back() : testsupport::small_rational(rng));
        }
        const LexTuple u(a), v(b);
        ok = ok && cmp_lex_tuple(*x, u, v) == cmp_omega_power(*x, lex_to_omega_term(x, u), lex_to_omega_term(x, v));
    }
    CHECK(ok);
    const auto ci = gen_certified_instance(ProblemTag::WopLex, 3, GenParams{4});
    CHECK(validate_descending(lex_to_omega_forward(std::get<LexSequence>(ci.instance)), 300).ok);
}

TEST_CASE("tcn stage zero examples") {
    CHECK(nth_prime(1) == 2);
    CHECK(nth_prime(5) == 11);
    {
        // g_1(0) = 0, U_0 = {}, count_1(0) = 2, a_1 = 2 + 1/1.
        TcnStageEngine eng({constant_enum(5)}, 10);
        const auto& s0 = eng.stage(0);
        CHECK(s0.guesses == std::vector<std::uint64_t>{0});
        CHECK(s0.u == 0);
        CHECK(s0.cycle.j == 1);
        CHECK(s0.value == Element::rational(Rational(3)));
        CHECK(s0.row.column(1) == Element::rational(Rational(3)));
        CHECK(s0.row.column(2).is_infinity());
    }
    {
        // g_1(0) = 1, U_0 = {1}, count_2(0) = 1, a_2 = 1 + 1/2.
        TcnStageEngine eng({constant_enum(0)}, 10);
        const auto& s0 = eng.stage(0);
        CHECK(s0.guesses == std::vector<std::uint64_t>{1});
        CHECK(s0.u == 1);
        CHECK(s0.cycle.j == 2);
        CHECK(s0.value == Element::rational(Rational(3, 2)));
        CHECK(s0.row.column(2) == s0.value);
    }
}

TEST_CASE("tcn decode examples") {
    CHECK(tcn_decode(1, Rational(3)) == std::vector<std::uint64_t>{0});
    CHECK(tcn_decode(1, Rational(3, 2)) == std::vector<std::uint64_t>{1});
    CHECK(tcn_decode(1, Rational(5) + Rational(1, 8 * 9)) == std::vector<std::uint64_t>{3});
    // Shifted primes leave the factor 2 unexplained.
    CHECK(code_of([] { tcn_decode(1, Rational(5) + Rational(1, 8 * 9), BackwardMutation::PrimeShift); }) ==
          ErrorCode::MalformedValue);

    Stream<Drawn> x([](std::size_t i) {
        return i < 2 ? Drawn{Element::infinity(), i} : Drawn{Element::rational(Rational(7) + Rational(1, 4 * 27 * 25)), i};
    });
    CHECK(tcn_to_lex_backward(2, x) == std::vector<std::uint64_t>{2, 3});
    Stream<Drawn> all_inf([](std::size_t i) { return Drawn{Element::infinity(), i}; });
    CHECK_THROWS_AS(tcn_to_lex_backward(1, all_inf, BackwardMutation::None, 8), Error);
}

TEST_CASE("tcn encode and decode are inverse") {
    Rng rng(4);
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + rng.below(kMaxTcnWidth);
        std::vector<std::uint64_t> g(n);
        for (auto& v : g) v = rng.below(6);
        const std::size_t stage = rng.below(7);
        const BigInt count(static_cast<long>(rng.below(100)));
        REQUIRE(tcn_decode(n, tcn_encode(count, g, stage)) == g);
    }
}

TEST_CASE("tcn images descend and decode their own guesses") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto ci = gen_certified_instance(ProblemTag::Tcn, seed, GenParams{2});
        const auto& e = std::get<std::vector<EnumerationStream>>(ci.instance);
        const auto img = tcn_to_lex_forward(e, 120);
        CHECK(validate_descending(img.sigma, 120).ok);
        for (std::size_t i = 0; i < 120; i += 7) {
            const auto& st = img.engine->stage(i);
            if (!st.value.is_rational()) continue;
            CHECK(tcn_decode(2, st.value.as_rational()) == st.guesses);
        }
        CHECK(code_of([&] { img.engine->stage(120); }) == ErrorCode::StageBudgetExceeded);
    }
}

TEST_CASE("functionals never see certificates") {
    static_assert(!std::is_invocable_v<decltype(&wop_to_ort_forward), const CertifiedInstance&>);
    static_assert(!std::is_invocable_v<decltype(&ort_to_ectwop_forward), const Certificate&>);
    static_assert(!std::is_invocable_v<decltype(&lex_to_omega_forward), const CertifiedInstance&>);
    static_assert(std::is_invocable_v<decltype(&tcn_to_lex_forward), const std::vector<EnumerationStream>&, std::size_t>);
    CHECK(parse_reduction_id(to_string(ReductionId::TcnToLex)) == ReductionId::TcnToLex);
    CHECK(code_of([] { parse_reduction_id("nope"); }) == ErrorCode::UnknownReduction);
    CHECK(all_reductions().size() == 6);
}
