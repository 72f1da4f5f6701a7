#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace wopbench {

/// Subsets of [n] = {1..n} as bitmasks; element m is bit m-1.
using Subset = std::uint32_t;

inline constexpr std::size_t kMaxResetWidth = 8;

/// A_1 = {} < A_2 < ... < A_{2^n} = [n], ordered by (popcount, binary value).
std::vector<Subset> subset_order(std::size_t n);
/// 1-based position j of `s` in subset_order(n).
std::size_t subset_index(std::size_t n, Subset s);
std::string format_subset(Subset s);

struct CycleStep {
    Subset v = 0;
    std::size_t j = 0;
};

/// reset_A for every A, plus the update history. Stage i is history().size().
class ResetState {
public:
    explicit ResetState(std::size_t n);

    std::size_t n() const { return n_; }
    std::size_t stage() const { return history_.size(); }
    std::int64_t reset(Subset a) const { return reset_.at(a); }
    const std::vector<std::int64_t>& resets() const { return reset_; }
    const std::vector<Subset>& history() const { return history_; }

    /// Consumes U_i and returns V_i with its index j_i.
    CycleStep step(Subset u);

private:
    std::size_t n_;
    std::vector<std::int64_t> reset_;
    /// window_[A] = union of U_h over reset_A < h < stage().
    std::vector<Subset> window_;
    std::vector<Subset> history_;
};

/// V_i recomputed from the history by the windowed-union definition.
Subset naive_cycle_set(const ResetState& state, Subset u);

/// Every B with union_{reset_B(i) < h <= i} U_h = B, where U_i = u.
std::vector<Subset> brute_force_completers(const ResetState& state, Subset u);

/// Replays `updates` from scratch.
ResetState replay(std::size_t n, const std::vector<Subset>& updates);

/// `i U_i V_i j_i resets=[...]`, resets listed in subset order after the step.
std::string trace_line(std::size_t i, Subset u, const CycleStep& step, const ResetState& after);

}  // namespace wopbench
