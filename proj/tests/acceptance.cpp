// One line per acceptance criterion; exit status 1 if any line fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "wopbench/adversary.hpp"
#include "wopbench/error.hpp"
#include "wopbench/harness.hpp"
#include "wopbench/random.hpp"

using namespace wopbench;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string summary;
};

// Wall-clock limits, in milliseconds.
constexpr double kLimitOracle = 1'000;
constexpr double kLimitWopOrt = 30'000;
constexpr double kLimitCycles = 30'000;
constexpr double kLimitOrtPipeline = 120'000;
constexpr double kLimitNone = 0;

constexpr std::size_t kEmbeddingPairs = 10'000;
constexpr std::uint64_t kRefuteFuel = 1'000'000;
constexpr std::uint64_t kStarveFuel = 10;

std::string first_failure(const Report& r) {
    for (const auto& t : r.trials) {
        if (t.verdict != "pass") return "trial " + std::to_string(t.id) + " " + t.verdict + ": " + t.detail;
    }
    return "";
}

std::size_t failing(const Report& r) {
    std::size_t n = 0;
    for (const auto& t : r.trials) n += t.verdict != "pass";
    return n;
}

RunConfig verify_cfg(const std::string& reduction, std::size_t trials, std::size_t depth, std::uint64_t seed) {
    RunConfig c;
    c.reduction = reduction;
    c.trials = trials;
    c.depth = depth;
    c.seed = seed;
    return c;
}

Outcome oracle_agreement() {
    Outcome o;
    std::ostringstream s;
    for (std::uint64_t alpha : {2u, 3u}) {
        RunConfig c;
        c.alpha = alpha;
        c.max_pairs = 3;
        c.max_exp = 4;
        const auto r = run_oracle_cnf(c);
        o.pass = o.pass && r.pass;
        s << "alpha " << alpha << ": " << r.trials.front().detail << "; ";
    }
    o.summary = s.str();
    return o;
}

Outcome wop_ort_round_trip() {
    const auto r = run_verify(verify_cfg("wop-to-ort", 200, 200, 7));
    return {r.pass, std::to_string(r.trials.size()) + " trials over Q, Z*, composite at depth 200, " +
                        std::to_string(failing(r)) + " failures " + first_failure(r)};
}

Outcome lemma_vi() {
    Outcome o;
    std::ostringstream s;
    for (std::size_t n = 1; n <= 4; ++n) {
        RunConfig c;
        c.n = n;
        c.trials = 50;
        c.stages = 500;
        c.seed = 100 + n;
        const auto r = run_lemma_vi(c);
        o.pass = o.pass && r.pass;
        s << "n=" << n << " " << failing(r) << " failures; ";
        if (!r.pass) s << first_failure(r) << "; ";
    }
    o.summary = "50 trials x 500 stages each: " + s.str();
    return o;
}

Outcome ort_pipeline() {
    // Trial t uses n = t mod 3 + 2.
    const auto r = run_verify(verify_cfg("ort-to-ect-wop", 100, 300, 4));
    return {r.pass, "n in {2,3,4}, 100 trials, Sigma depth 300, 64 extracted values per trial, " +
                        std::to_string(failing(r)) + " failures " + first_failure(r)};
}

Outcome lex_embedding() {
    Rng rng(2024);
    const auto x = make_order(LinearOrder::rationals());
    auto draw = [&rng] {
        return Element::rational(rng.between(-6, 6), static_cast<unsigned long>(rng.between(1, 4)));
    };
    std::size_t agree = 0;
    for (std::size_t k = 0; k < kEmbeddingPairs; ++k) {
        const std::size_t n = 1 + rng.below(5);
        std::vector<Element> a, b;
        for (std::size_t c = 0; c < n; ++c) {
            a.push_back(draw());
            b.push_back(rng.chance(2, 3) ? a.back() : draw());
        }
        const LexTuple u(a), v(b);
        agree += cmp_lex_tuple(*x, u, v) == cmp_omega_power(*x, lex_to_omega_term(x, u), lex_to_omega_term(x, v));
    }
    return {agree == kEmbeddingPairs, std::to_string(agree) + "/" + std::to_string(kEmbeddingPairs) + " pairs agree"};
}

Outcome tcn_lex() {
    auto c = verify_cfg("tcn-to-lex", 100, 200, 6);
    c.stage_budget = 200;
    const auto r = run_verify(c);
    return {r.pass, "n in {1,2,3}, 100 trials, budget 200, decode checked at every stage, " +
                        std::to_string(failing(r)) + " failures " + first_failure(r)};
}

Outcome adversaries() {
    Outcome o;
    std::map<AdversaryKind, int> refuted;
    int starved = 0, ill_formed = 0, ill_formed_expected = 0;
    std::string skipped, problems;
    for (const auto& c : candidate_catalog()) {
        const std::string name = std::string(to_string(c.which)) + "/" + c.id;
        const auto v = run_duel(c, kRefuteFuel);
        if (v.kind != c.expected) problems += name + " got " + std::string(to_string(v.kind)) + "; ";
        if (c.expected == VerdictKind::CandidateIllFormed) {
            ++ill_formed_expected;
            ill_formed += v.kind == VerdictKind::CandidateIllFormed;
        }
        if (v.kind != VerdictKind::RefutationFound) continue;
        std::string why;
        if (!check_refutation(c, *v.refutation, &why)) {
            problems += name + " refutation rejected: " + why + "; ";
            continue;
        }
        ++refuted[c.which];
        // A refutation that costs at most 10 fuel cannot run dry at 10.
        if (v.fuel_used <= kStarveFuel) {
            skipped += name + " ";
            continue;
        }
        const auto low = run_duel(c, kStarveFuel);
        if (low.kind == VerdictKind::BudgetExhausted) {
            ++starved;
        } else {
            problems += name + " at fuel 10 got " + std::string(to_string(low.kind)) + "; ";
        }
    }
    std::ostringstream s;
    for (auto which : {AdversaryKind::WopEct, AdversaryKind::LexLpo, AdversaryKind::IsFiniteWop}) {
        s << to_string(which) << " " << refuted[which] << " refuted; ";
        o.pass = o.pass && refuted[which] >= 3;
    }
    s << starved << " exhausted at fuel 10";
    if (!skipped.empty()) s << " (refuted within 10 fuel: " << skipped << ")";
    s << "; " << ill_formed << "/" << ill_formed_expected << " non-monotone candidates ill-formed";
    o.pass = o.pass && problems.empty() && starved > 0 && ill_formed == ill_formed_expected && ill_formed > 0;
    if (!problems.empty()) s << "; " << problems;
    o.summary = s.str();
    return o;
}

Outcome mutations() {
    struct Case {
        const char* reduction;
        BackwardMutation m;
    };
    Outcome o;
    std::ostringstream s;
    for (const auto& [reduction, m] : {Case{"ort-to-ect-wop", BackwardMutation::StrideOffByOne},
                                      Case{"ort-full-pipeline", BackwardMutation::StrideOffByOne},
                                      Case{"wop-to-ort", BackwardMutation::ParityFlip},
                                      Case{"tcn-to-lex", BackwardMutation::PrimeShift}}) {
        auto c = verify_cfg(reduction, 20, 200, 8);
        c.mutation = m;
        const auto r = run_verify(c);
        const std::size_t bad = failing(r);
        o.pass = o.pass && bad > 0;
        std::string label = "none";
        for (const auto& t : r.trials) {
            if (t.verdict != "pass") {
                label = t.verdict;
                break;
            }
        }
        s << to_string(m) << " on " << reduction << ": " << bad << "/20 caught (" << label << "); ";
    }
    o.summary = s.str();
    return o;
}

Outcome determinism() {
    Outcome o;
    std::size_t compared = 0;
    auto same = [&](const std::string& what, const std::function<Report()>& run) {
        const auto a = deterministic_view(run()).dump();
        const auto b = deterministic_view(run()).dump();
        ++compared;
        if (a != b) {
            o.pass = false;
            o.summary += what + " differs; ";
        }
    };
    for (auto id : all_reductions()) {
        same(std::string(to_string(id)), [id] { return run_verify(verify_cfg(std::string(to_string(id)), 12, 120, 3)); });
    }
    same("lemma-vi", [] {
        RunConfig c;
        c.n = 4;
        c.trials = 10;
        c.stages = 200;
        c.seed = 1;
        return run_lemma_vi(c);
    });
    same("oracle-cnf", [] {
        RunConfig c;
        c.alpha = 3;
        return run_oracle_cnf(c);
    });
    for (const char* cand : {"const-column", "column-one-only"}) {
        same(std::string("adversary wop-ect ") + cand, [cand] {
            RunConfig c;
            c.which = "wop-ect";
            c.candidate = cand;
            c.fuel = 50'000;
            auto r = run_adversary(c);
            // The transcript is part of the output too.
            nlohmann::json log = r.transcript;
            r.trials.front().detail += log.dump();
            return r;
        });
    }
    o.summary = std::to_string(compared) + " commands run twice" + (o.pass ? ", identical" : ": " + o.summary);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double limit_ms;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "ordinal oracle agreement", kLimitOracle, oracle_agreement},
        {2, "wop-to-ort round trip", kLimitWopOrt, wop_ort_round_trip},
        {3, "cycle completion uniqueness", kLimitCycles, lemma_vi},
        {4, "ORT[n] pipeline", kLimitOrtPipeline, ort_pipeline},
        {5, "lex to omega embedding", kLimitNone, lex_embedding},
        {6, "TC_N to lex", kLimitNone, tcn_lex},
        {7, "adversary refutations", kLimitNone, adversaries},
        {8, "mutation sensitivity", kLimitNone, mutations},
        {9, "determinism", kLimitNone, determinism},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const Error& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        const bool in_time = c.limit_ms == kLimitNone || ms < c.limit_ms;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::cout << "criterion " << c.id << " [" << c.title << "]: " << (pass ? "PASS" : "FAIL") << " - " << o.summary
                  << " (" << static_cast<long long>(ms) << " ms";
        if (c.limit_ms != kLimitNone) std::cout << ", limit " << static_cast<long long>(c.limit_ms) << " ms";
        std::cout << ")\n";
    }
    return all ? 0 : 1;
}
