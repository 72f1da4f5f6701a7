#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "wopbench/adversary.hpp"
#include "wopbench/error.hpp"
#include "wopbench/harness.hpp"

using namespace wopbench;

namespace {

RunConfig verify_cfg(std::string reduction, std::size_t trials, std::size_t depth, std::uint64_t seed) {
    RunConfig c;
    c.reduction = std::move(reduction);
    c.trials = trials;
    c.depth = depth;
    c.seed = seed;
    return c;
}

std::string failures(const Report& r) {
    std::string out;
    for (const auto& t : r.trials) {
        if (t.verdict != "pass") out += std::to_string(t.id) + ": " + t.verdict + " " + t.detail + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("every reduction verifies on small runs") {
    for (auto id : all_reductions()) {
        CAPTURE(to_string(id));
        const auto r = run_verify(verify_cfg(std::string(to_string(id)), 6, 96, 5));
        CHECK_MESSAGE(r.pass, failures(r));
        CHECK(r.trials.size() == 6);
        for (const auto& t : r.trials) CHECK(t.fixture.is_null());
    }
}

TEST_CASE("mutated backward maps are caught") {
    struct Case {
        const char* reduction;
        BackwardMutation m;
    };
    for (const auto& [reduction, m] : {Case{"ort-to-ect-wop", BackwardMutation::StrideOffByOne},
                                      Case{"ort-full-pipeline", BackwardMutation::StrideOffByOne},
                                      Case{"wop-to-ort", BackwardMutation::ParityFlip},
                                      Case{"tcn-to-lex", BackwardMutation::PrimeShift}}) {
        CAPTURE(reduction);
        CAPTURE(to_string(m));
        auto cfg = verify_cfg(reduction, 8, 128, 11);
        cfg.mutation = m;
        const auto r = run_verify(cfg);
        CHECK_FALSE(r.pass);
        const auto bad = std::find_if(r.trials.begin(), r.trials.end(), [](const TrialRecord& t) { return t.verdict != "pass"; });
        REQUIRE(bad != r.trials.end());
        // Failing trials carry a fixture that regenerates the source instance.
        CHECK(bad->fixture.contains("tag"));
        CHECK_NOTHROW(from_fixture(bad->fixture));
    }
}

TEST_CASE("reports are deterministic modulo timing") {
    auto cfg = verify_cfg("ort-to-ect-wop", 6, 120, 9);
    cfg.threads = 4;
    const auto a = run_verify(cfg);
    cfg.threads = 1;
    const auto b = run_verify(cfg);
    CHECK(deterministic_view(a).dump() == deterministic_view(b).dump());
    CHECK_FALSE(deterministic_view(a).contains("wall_ms"));

    RunConfig lem;
    lem.n = 3;
    lem.stages = 100;
    lem.trials = 4;
    lem.seed = 2;
    CHECK(deterministic_view(run_lemma_vi(lem)).dump() == deterministic_view(run_lemma_vi(lem)).dump());
}

TEST_CASE("cycle-completion runner agrees with brute force") {
    for (std::size_t n = 1; n <= 4; ++n) {
        RunConfig cfg;
        cfg.n = n;
        cfg.stages = 300;
        cfg.trials = 5;
        cfg.seed = n;
        const auto r = run_lemma_vi(cfg);
        CHECK_MESSAGE(r.pass, failures(r));
    }
    RunConfig wide;
    wide.n = 5;
    CHECK_THROWS_AS(run_lemma_vi(wide), Error);
}

TEST_CASE("oracle-cnf runner") {
    RunConfig cfg;
    cfg.alpha = 2;
    cfg.max_pairs = 3;
    cfg.max_exp = 4;
    const auto r = run_oracle_cnf(cfg);
    CHECK(r.pass);
    // Exponent subsets of {0..3} with at most 3 elements, coefficient 1 only.
    CHECK(enumerate_terms(2, 3, 4).size() == 15);
    // Same subsets, two coefficients per pair: 1 + 4*2 + 6*4 + 4*8.
    CHECK(enumerate_terms(3, 3, 4).size() == 65);
}

TEST_CASE("adversary runner") {
    RunConfig cfg;
    cfg.which = "wop-ect";
    cfg.candidate = "const-column";
    const auto r = run_adversary(cfg);
    CHECK(r.pass);
    REQUIRE(r.trials.size() == 1);
    CHECK(r.trials[0].verdict == "RefutationFound");
    CHECK(r.trials[0].fixture.at("checked") == true);
    CHECK_FALSE(r.transcript.empty());

    cfg.fuel = 10;
    const auto low = run_adversary(cfg);
    CHECK_FALSE(low.pass);
    CHECK(low.trials[0].verdict == "BudgetExhausted");

    cfg.which = "isfinite-wop";
    cfg.candidate = "retract-k";
    cfg.fuel = 1'000'000;
    CHECK(run_adversary(cfg).trials[0].verdict == "CandidateIllFormed");

    cfg.candidate = "missing";
    CHECK_THROWS_AS(run_adversary(cfg), Error);
}

TEST_CASE("report json schema") {
    const auto r = run_verify(verify_cfg("lex-to-omega", 3, 40, 1));
    const auto j = to_json(r);
    CHECK(j.at("schema") == kReportSchema);
    for (const char* key : {"config", "trials", "pass", "wall_ms"}) CHECK(j.contains(key));
    CHECK(j.at("config").at("reduction") == "lex-to-omega");
    REQUIRE(j.at("trials").size() == 3);
    for (const auto& t : j.at("trials")) {
        CHECK(t.contains("id"));
        CHECK(t.contains("verdict"));
        CHECK(t.contains("detail"));
    }

    const std::string path = "harness_report_test.json";
    write_report(r, path);
    std::ifstream in(path);
    const auto back = nlohmann::json::parse(in);
    CHECK(back.at("pass") == true);
    std::remove(path.c_str());
}

TEST_CASE("certified solve examples") {
    CHECK(std::get<EctSolution>(certified_solve(ProblemTag::Ect, UnaryColorStream{}, EctCert{17, {}})).bound == 17);
    const auto t = certified_solve(ProblemTag::Tcn, std::vector<EnumerationStream>{}, TcnCert{{{9, 4}, {}}});
    CHECK(std::get<TcnSolution>(t).values == std::vector<std::uint64_t>{4, 0});
    const auto ci = gen_certified_instance(ProblemTag::Ort, 3, GenParams{3});
    const auto h = std::get<Stream<std::size_t>>(certified_solve(ci.tag, ci.instance, ci.certificate));
    CHECK(validate_solution_prefix(ci, OrtSolution{h.take(100)}).ok);
}

TEST_CASE("bad configurations") {
    CHECK_THROWS_AS(run_verify(verify_cfg("nope", 1, 10, 0)), Error);
    CHECK_THROWS_AS(run_verify(verify_cfg("wop-to-ort", 0, 10, 0)), Error);
    CHECK_THROWS_AS(parse_mutation("off-by-two"), Error);
    for (auto m : {BackwardMutation::None, BackwardMutation::StrideOffByOne, BackwardMutation::ParityFlip,
                   BackwardMutation::PrimeShift}) {
        CHECK(parse_mutation(to_string(m)) == m);
    }
}
