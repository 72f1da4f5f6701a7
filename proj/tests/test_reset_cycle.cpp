#include <doctest.h>

#include <bit>

#include "wopbench/error.hpp"
#include "wopbench/random.hpp"
#include "wopbench/reset_cycle.hpp"

using namespace wopbench;

namespace {

constexpr Subset S1 = 0b01, S2 = 0b10, S12 = 0b11;

/// Independent model: plain vectors, windows recomputed from the history.
struct HandModel {
    std::size_t n;
    std::vector<long> reset;
    std::vector<Subset> hist;

    explicit HandModel(std::size_t n_) : n(n_), reset(std::size_t{1} << n_, -1) {}

    Subset window(Subset b, Subset u) const {
        Subset acc = u;
        for (long h = reset[b] + 1; h < static_cast<long>(hist.size()); ++h) acc |= hist[static_cast<std::size_t>(h)];
        return acc;
    }

    std::vector<Subset> completers(Subset u) const {
        std::vector<Subset> out;
        for (Subset b = 0; b < (Subset{1} << n); ++b) {
            if (window(b, u) == b) out.push_back(b);
        }
        return out;
    }

    /// Resets every A below some completer.
    void advance(Subset u) {
        const auto done = completers(u);
        const long i = static_cast<long>(hist.size());
        for (Subset a = 0; a < (Subset{1} << n); ++a) {
            for (auto b : done) {
                if ((a & b) == a) reset[a] = i;
            }
        }
        hist.push_back(u);
    }
};

}  // namespace

TEST_CASE("subset ordering") {
    CHECK(subset_order(2) == std::vector<Subset>{0, S1, S2, S12});
    CHECK(subset_order(3) == std::vector<Subset>{0, 1, 2, 4, 3, 5, 6, 7});
    for (std::size_t n = 0; n <= 5; ++n) {
        const auto order = subset_order(n);
        REQUIRE(order.size() == std::size_t{1} << n);
        for (std::size_t k = 0; k < order.size(); ++k) {
            CHECK(subset_index(n, order[k]) == k + 1);
            // Extends inclusion: proper subsets come earlier.
            for (std::size_t l = k + 1; l < order.size(); ++l) CHECK_FALSE((order[l] & order[k]) == order[l]);
        }
    }
    CHECK(format_subset(0) == "{}");
    CHECK(format_subset(0b101) == "{1,3}");
    CHECK_THROWS_AS(subset_order(kMaxResetWidth + 1), Error);
    CHECK_THROWS_AS(subset_index(2, 0b100), Error);
}

TEST_CASE("stage zero examples") {
    ResetState s(1);
    CHECK(s.reset(0) == -1);
    CHECK(s.reset(S1) == -1);
    const auto st = s.step(S1);
    CHECK(st.v == S1);
    CHECK(st.j == 2);
    CHECK(s.reset(0) == 0);
    CHECK(s.reset(S1) == 0);

    ResetState e(2);
    const auto st0 = e.step(0);
    CHECK(st0.v == 0);
    CHECK(st0.j == 1);
    CHECK(e.reset(0) == 0);
    CHECK(e.reset(S1) == -1);
}

TEST_CASE("alternating updates on two coordinates") {
    // Hand simulation:
    //   i=0: window of {1} is U_0 = {1}.
    //   i=1: {2} never reset, window U_0 u U_1 = {1,2}; everything resets to 1.
    //   i=2: {1} was reset at 1, window U_2 = {1}.
    const std::vector<Subset> expected_v{S1, S12, S1};
    ResetState s(2);
    std::vector<Subset> got;
    for (Subset u : {S1, S2, S1}) got.push_back(s.step(u).v);
    CHECK(got == expected_v);
    CHECK(s.reset(S1) == 2);
    CHECK(s.reset(0) == 2);
    CHECK(s.reset(S2) == 1);
    CHECK(s.reset(S12) == 1);
    CHECK(trace_line(2, S1, {S1, 2}, s) == "2 {1} {1} 2 resets=[2,2,1,1]");
}

TEST_CASE("exactly one subset completes a cycle at every stage") {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            Rng rng(seed * 31 + n);
            ResetState s(n);
            HandModel model(n);
            bool ok = true;
            for (int i = 0; i < 500; ++i) {
                // Sparse updates make long windows likely.
                Subset u = 0;
                for (std::size_t m = 0; m < n; ++m) {
                    if (rng.chance(1, 3)) u |= Subset{1} << m;
                }
                const auto hand = model.completers(u);
                const auto lib = brute_force_completers(s, u);
                ok = ok && hand.size() == 1 && lib == hand;
                ok = ok && naive_cycle_set(s, u) == hand.front();
                const auto before = s.resets();
                const auto st = s.step(u);
                model.advance(u);
                ok = ok && st.v == hand.front() && st.j == subset_index(n, st.v);
                for (Subset a = 0; a < (Subset{1} << n); ++a) {
                    // Reset at stage i exactly when A is below V_i.
                    const bool below = (a & st.v) == a;
                    ok = ok && (s.reset(a) == i) == below;
                    if (!below) ok = ok && s.reset(a) == before[a];
                    ok = ok && s.reset(a) == model.reset[a];
                    ok = ok && s.reset(a) < static_cast<std::int64_t>(s.stage());
                }
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("state is replayable from its history") {
    Rng rng(7);
    ResetState s(3);
    std::vector<CycleStep> steps;
    for (int i = 0; i < 200; ++i) steps.push_back(s.step(static_cast<Subset>(rng.below(8))));
    const auto again = replay(3, s.history());
    CHECK(again.resets() == s.resets());
    CHECK(again.history() == s.history());
    ResetState fresh(3);
    bool same = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto st = fresh.step(s.history()[i]);
        same = same && st.v == steps[i].v && st.j == steps[i].j;
    }
    CHECK(same);
    CHECK_THROWS_AS(fresh.step(0b1000), Error);
}
