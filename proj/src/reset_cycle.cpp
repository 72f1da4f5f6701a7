#include "wopbench/reset_cycle.hpp"

#include <algorithm>
#include <bit>

#include "wopbench/error.hpp"

namespace wopbench {

std::vector<Subset> subset_order(std::size_t n) {
    if (n > kMaxResetWidth) throw Error(ErrorCode::ParamsOutOfRange, "subset width above " + std::to_string(kMaxResetWidth));
    std::vector<Subset> all(std::size_t{1} << n);
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = static_cast<Subset>(s);
    std::stable_sort(all.begin(), all.end(), [](Subset a, Subset b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    return all;
}

std::size_t subset_index(std::size_t n, Subset s) {
    if (n > kMaxResetWidth || (s >> n) != 0) throw Error(ErrorCode::ParamsOutOfRange, "subset outside [n]");
    // Count subsets that precede s: smaller popcount, or equal popcount and smaller value.
    const int k = std::popcount(s);
    std::size_t before = 0;
    for (Subset t = 0; t < (Subset{1} << n); ++t) {
        const int pt = std::popcount(t);
        if (pt < k || (pt == k && t < s)) ++before;
    }
    return before + 1;
}

std::string format_subset(Subset s) {
    std::string out = "{";
    bool first = true;
    for (std::size_t m = 1; s >> (m - 1); ++m) {
        if (!((s >> (m - 1)) & 1U)) continue;
        if (!first) out += ",";
        out += std::to_string(m);
        first = false;
    }
    return out + "}";
}

ResetState::ResetState(std::size_t n) : n_(n) {
    if (n > kMaxResetWidth) throw Error(ErrorCode::ParamsOutOfRange, "subset width above " + std::to_string(kMaxResetWidth));
    reset_.assign(std::size_t{1} << n, -1);
    window_.assign(std::size_t{1} << n, 0);
}

CycleStep ResetState::step(Subset u) {
    if ((u >> n_) != 0) throw Error(ErrorCode::ParamsOutOfRange, "update set outside [n]");
    const auto i = static_cast<std::int64_t>(history_.size());
    for (auto& w : window_) w |= u;
    const Subset v = window_[u];
    // A is reset iff A is a subset of V_i.
    for (Subset a = v;; a = (a - 1) & v) {
        reset_[a] = i;
        window_[a] = 0;
        if (a == 0) break;
    }
    history_.push_back(u);
    return {v, subset_index(n_, v)};
}

namespace {

Subset window_union(const ResetState& state, Subset b, Subset u) {
    const auto& h = state.history();
    Subset acc = u;
    for (auto k = state.reset(b) + 1; k < static_cast<std::int64_t>(h.size()); ++k) acc |= h[static_cast<std::size_t>(k)];
    return acc;
}

}  // namespace

Subset naive_cycle_set(const ResetState& state, Subset u) { return window_union(state, u, u); }

std::vector<Subset> brute_force_completers(const ResetState& state, Subset u) {
    std::vector<Subset> out;
    for (Subset b = 0; b < (Subset{1} << state.n()); ++b) {
        if (window_union(state, b, u) == b) out.push_back(b);
    }
    return out;
}

ResetState replay(std::size_t n, const std::vector<Subset>& updates) {
    ResetState s(n);
    for (auto u : updates) s.step(u);
    return s;
}

std::string trace_line(std::size_t i, Subset u, const CycleStep& step, const ResetState& after) {
    std::string out = std::to_string(i) + " " + format_subset(u) + " " + format_subset(step.v) + " " +
                      std::to_string(step.j) + " resets=[";
    bool first = true;
    for (auto a : subset_order(after.n())) {
        if (!first) out += ",";
        out += std::to_string(after.reset(a));
        first = false;
    }
    return out + "]";
}

}  // namespace wopbench
