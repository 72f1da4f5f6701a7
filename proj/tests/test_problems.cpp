#include <doctest.h>

#include <set>

#include "support.hpp"
#include "wopbench/error.hpp"
#include "wopbench/harness.hpp"
#include "wopbench/problems.hpp"

using namespace wopbench;
using testsupport::q;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::ParseError;
}

std::vector<std::string> render_prefix(const CertifiedInstance& ci, std::size_t depth) {
    std::vector<std::string> out;
    std::visit(
        [&](const auto& inst) {
            using T = std::decay_t<decltype(inst)>;
            for (std::size_t i = 0; i < depth; ++i) {
                if constexpr (std::is_same_v<T, UnaryColorStream>) {
                    out.push_back(std::to_string(inst.at(i)));
                } else if constexpr (std::is_same_v<T, std::vector<EnumerationStream>>) {
                    for (const auto& e : inst) out.push_back(std::to_string(e.at(i)));
                } else if constexpr (std::is_same_v<T, OmegaSequence>) {
                    out.push_back(format(inst.terms.at(i)));
                } else if constexpr (std::is_same_v<T, LexSequence>) {
                    out.push_back(format(inst.rows.at(i)));
                } else {
                    for (std::size_t j = i + 1; j < std::min(depth, i + 8); ++j) {
                        out.push_back(std::to_string(inst.coloring(i, j)));
                    }
                }
            }
        },
        ci.instance);
    return out;
}

/// Transitive and antisymmetric, checked directly on the table.
bool hand_partial_order(std::size_t n, const std::vector<bool>& leq) {
    for (std::size_t a = 0; a < n; ++a) {
        if (!leq[a * n + a]) return false;
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && leq[a * n + b] && leq[b * n + a]) return false;
            for (std::size_t c = 0; c < n; ++c) {
                if (leq[a * n + b] && leq[b * n + c] && !leq[a * n + c]) return false;
            }
        }
    }
    return true;
}

struct TagCase {
    ProblemTag tag;
    GenParams params;
};

std::vector<TagCase> all_families() {
    std::vector<TagCase> cases;
    for (std::size_t n : {1u, 3u}) cases.push_back({ProblemTag::Ect, GenParams{n}});
    for (std::size_t n : {1u, 2u}) cases.push_back({ProblemTag::Tcn, GenParams{n}});
    for (const char* o : {"Q", "Z*", "composite"}) {
        GenParams p{2};
        p.order = o;
        cases.push_back({ProblemTag::WopOmega, p});
    }
    cases.push_back({ProblemTag::WopLex, GenParams{3}});
    cases.push_back({ProblemTag::Ort, GenParams{3}});
    GenParams img{2};
    img.ort_family = OrtFamily::WopImage;
    cases.push_back({ProblemTag::Ort, img});
    return cases;
}

}  // namespace

TEST_CASE("linear extension examples") {
    CHECK(linear_extension(FinitePoset::antichain(3)) == std::vector<std::size_t>{0, 1, 2});
    CHECK(linear_extension(FinitePoset::chain(3)) == std::vector<std::size_t>{0, 1, 2});
    const auto diamond = FinitePoset::from_covers(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    CHECK(linear_extension(diamond) == std::vector<std::size_t>{0, 1, 2, 3});
    // 2 < 0 forces 2 first, then the lowest remaining index.
    CHECK(linear_extension(FinitePoset::from_covers(3, {{2, 0}})) == std::vector<std::size_t>{1, 2, 0});
    CHECK(linear_extension(FinitePoset::reversed_chain(3)) == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("linear extension respects every poset on at most 5 elements") {
    // Labeled poset counts 1, 1, 3, 19, 219, 4231 (n = 0..5).
    const std::size_t expected[] = {1, 1, 3, 19, 219, 4231};
    for (std::size_t n = 1; n <= 5; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> offdiag;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b) offdiag.emplace_back(a, b);
            }
        }
        std::size_t posets = 0;
        bool ok = true;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << offdiag.size()); ++mask) {
            std::vector<bool> leq(n * n, false);
            for (std::size_t a = 0; a < n; ++a) leq[a * n + a] = true;
            for (std::size_t k = 0; k < offdiag.size(); ++k) {
                if (mask >> k & 1) leq[offdiag[k].first * n + offdiag[k].second] = true;
            }
            const bool po = hand_partial_order(n, leq);
            ok = ok && po == is_partial_order(n, leq);
            if (!po) continue;
            ++posets;
            const FinitePoset p(n, leq);
            const auto ext = linear_extension(p);
            std::vector<std::size_t> pos(n);
            for (std::size_t i = 0; i < n; ++i) pos[ext[i]] = i;
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    if (p.leq(a, b)) ok = ok && pos[a] <= pos[b];
                }
            }
        }
        CHECK(ok);
        CHECK(posets == expected[n]);
    }
}

TEST_CASE("poset construction errors") {
    CHECK(code_of([] { FinitePoset(2, {true, true, true, true}); }) == ErrorCode::NotAPartialOrder);
    CHECK(code_of([] { FinitePoset(2, {false, false, false, true}); }) == ErrorCode::NotAPartialOrder);
    CHECK(FinitePoset::chain(3).related_pairs() == 6);
}

TEST_CASE("right-ordered validation") {
    const auto chain2 = FinitePoset::chain(2);
    CHECK(validate_right_ordered(chain2, ColoringStream(2, [](std::size_t, std::size_t) { return 1; }), 50).ok);
    // c(0,1) = p2 above c(0,2) = p1 although 1 < 2.
    const ColoringStream bad(2, [](std::size_t i, std::size_t j) { return i == 0 && j == 2 ? 0 : 1; });
    const auto rep = validate_right_ordered(chain2, bad, 20);
    CHECK_FALSE(rep.ok);
    CHECK(rep.counterexample == std::vector<std::size_t>{0, 1, 2});
    const ColoringStream wild(2, [](std::size_t, std::size_t) { return 7; });
    CHECK(code_of([&] { wild(0, 1); }) == ErrorCode::ColorOutOfRange);
}

TEST_CASE("descending validation") {
    const auto c3 = make_order(LinearOrder::finite_chain(3));
    const std::size_t k = 12;
    OmegaSequence s{c3, Stream<OmegaTerm>([c3, k](std::size_t i) {
                        return OmegaTerm(c3, {{k - std::min(i, k), Element::integer(1)}});
                    })};
    CHECK(validate_descending(s, k).ok);
    OmegaSequence flat{c3, Stream<OmegaTerm>([c3](std::size_t) { return OmegaTerm(c3, {{1, Element::integer(2)}}); })};
    const auto rep = validate_descending(flat, 10);
    CHECK_FALSE(rep.ok);
    CHECK(rep.counterexample.front() == 1);
}

TEST_CASE("solution prefix validation examples") {
    OrtInstance ort{FinitePoset::chain(2), ColoringStream(2, [](std::size_t, std::size_t) { return 0; })};
    const std::vector<std::size_t> idx{3, 7, 9};
    CHECK(validate_ort_solution(ort, idx).ok);
    const std::vector<std::size_t> not_increasing{3, 3};
    CHECK_FALSE(validate_ort_solution(ort, not_increasing).ok);

    TcnCert cert{{{4}}};
    const std::vector<std::uint64_t> four{4}, two{2};
    CHECK(validate_tcn_solution(cert, four).ok);
    CHECK_FALSE(validate_tcn_solution(cert, two).ok);
    TcnCert full{{{}}};
    CHECK(validate_tcn_solution(full, two).ok);
}

TEST_CASE("planted WOP witnesses validate") {
    for (auto tag : {ProblemTag::WopOmega, ProblemTag::WopLex}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto ci = gen_certified_instance(tag, seed, GenParams{3});
            const auto& cert = std::get<WopCert>(ci.certificate);
            CHECK(validate_solution_prefix(ci, WopSolution{cert.witness.take(50)}).ok);
        }
    }
}

TEST_CASE("ECT colors after the planted index recur") {
    const auto ci = gen_certified_instance(ProblemTag::Ect, 1, GenParams{3});
    const auto& inst = std::get<UnaryColorStream>(ci.instance);
    const auto& cert = std::get<EctCert>(ci.certificate);
    const std::size_t s = cert.stabilization_index;
    const std::size_t horizon = 10 * s + 10;
    // Each color seen in (s, horizon] shows up again before 2 * horizon.
    bool ok = true;
    for (std::size_t x = s + 1; x <= horizon; ++x) {
        bool again = false;
        for (std::size_t y = x + 1; y <= 2 * horizon && !again; ++y) again = inst.at(y) == inst.at(x);
        ok = ok && again;
    }
    CHECK(ok);
    // The planted index itself carries a color that never comes back.
    bool head_recurs = false;
    for (std::size_t y = s + 1; y <= 2 * horizon; ++y) head_recurs = head_recurs || inst.at(y) == inst.at(s);
    CHECK_FALSE(head_recurs);
    CHECK(validate_ect_solution(inst, cert, s).ok);
    CHECK(validate_ect_solution(inst, cert, s + 5).ok);
    if (s > 0) CHECK_FALSE(validate_ect_solution(inst, cert, s - 1).ok);
}

TEST_CASE("full-range TC_N certificates withhold nothing") {
    GenParams p{3};
    p.full_range = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ci = gen_certified_instance(ProblemTag::Tcn, seed, p);
        for (const auto& w : std::get<TcnCert>(ci.certificate).withheld) CHECK(w.empty());
    }
}

TEST_CASE("generators are deterministic") {
    for (const auto& [tag, params] : all_families()) {
        for (std::uint64_t seed : {0u, 17u}) {
            const auto a = gen_certified_instance(tag, seed, params);
            const auto b = gen_certified_instance(tag, seed, params);
            CHECK(render_prefix(a, 60) == render_prefix(b, 60));
            CHECK(to_fixture(a, 32) == to_fixture(b, 32));
        }
    }
    const auto a = gen_certified_instance(ProblemTag::Ect, 1, GenParams{3});
    const auto b = gen_certified_instance(ProblemTag::Ect, 2, GenParams{3});
    CHECK(render_prefix(a, 60) != render_prefix(b, 60));
}

TEST_CASE("every certified instance passes its own validator to depth 500") {
    const std::size_t depth = 500;
    for (const auto& [tag, params] : all_families()) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto ci = gen_certified_instance(tag, seed, params);
            CAPTURE(to_string(tag));
            CAPTURE(seed);
            const auto sol = certified_solve(tag, ci.instance, ci.certificate);
            SolutionPrefix prefix;
            if (auto* e = std::get_if<EctSolution>(&sol)) prefix = *e;
            else if (auto* t = std::get_if<TcnSolution>(&sol)) prefix = *t;
            else if (auto* w = std::get_if<Stream<Drawn>>(&sol)) prefix = WopSolution{w->take(depth)};
            else prefix = OrtSolution{std::get<Stream<std::size_t>>(sol).take(100)};
            const auto rep = validate_solution_prefix(ci, prefix, depth);
            CHECK_MESSAGE(rep.ok, rep.detail);
            if (tag == ProblemTag::WopOmega) CHECK(validate_descending(std::get<OmegaSequence>(ci.instance), depth).ok);
            if (tag == ProblemTag::WopLex) CHECK(validate_descending(std::get<LexSequence>(ci.instance), depth).ok);
            if (tag == ProblemTag::Ort) {
                const auto& inst = std::get<OrtInstance>(ci.instance);
                CHECK(validate_right_ordered(inst.poset, inst.coloring, params.ort_family == OrtFamily::WopImage ? 300 : 120).ok);
            }
        }
    }
}

TEST_CASE("certified solve examples") {
    EctCert ect{17, {0, 1}};
    UnaryColorStream dummy{2, Stream<std::size_t>([](std::size_t i) { return i % 2; })};
    const auto sol = certified_solve(ProblemTag::Ect, dummy, ect);
    CHECK(std::get<EctSolution>(sol).bound == 17);
    TcnCert tcn{{{9, 4}}};
    const auto t = certified_solve(ProblemTag::Tcn, std::vector<EnumerationStream>{}, tcn);
    CHECK(std::get<TcnSolution>(t).values == std::vector<std::uint64_t>{4});
    CHECK(code_of([&] { certified_solve(ProblemTag::Ort, dummy, ect); }) == ErrorCode::CertificateMismatch);
}

TEST_CASE("fixtures round trip and detect tampering") {
    for (const auto& [tag, params] : all_families()) {
        const auto ci = gen_certified_instance(tag, 42, params);
        const auto fx = to_fixture(ci, 16);
        const auto back = from_fixture(nlohmann::json::parse(fx.dump()));
        CHECK(to_fixture(back, 16) == fx);
        auto bad = fx;
        bad["seed"] = 43;
        CHECK(code_of([&] { from_fixture(bad); }) == ErrorCode::CertificateMismatch);
    }
}

TEST_CASE("generator and dispatch errors") {
    CHECK(code_of([] { gen_certified_instance(ProblemTag::Ect, 0, GenParams{0}); }) == ErrorCode::ParamsOutOfRange);
    CHECK(code_of([] { gen_certified_instance(ProblemTag::Ort, 0, GenParams{7}); }) == ErrorCode::ParamsOutOfRange);
    CHECK(code_of([] { parse_problem_tag("RT22"); }) == ErrorCode::UnknownTag);
    const auto ci = gen_certified_instance(ProblemTag::Ect, 0, GenParams{2});
    CHECK(code_of([&] { validate_solution_prefix(ci, TcnSolution{{1}}); }) == ErrorCode::UnknownTag);
    for (auto tag : {ProblemTag::Ect, ProblemTag::Tcn, ProblemTag::WopOmega, ProblemTag::WopLex, ProblemTag::Ort}) {
        CHECK(parse_problem_tag(to_string(tag)) == tag);
    }
}
