#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wopbench/order.hpp"
#include "wopbench/problems.hpp"
#include "wopbench/reset_cycle.hpp"
#include "wopbench/stream.hpp"

namespace wopbench {

enum class ReductionId { WopToOrt, OrtProduct, OrtToEctWop, LexToOmega, TcnToLex, OrtFullPipeline };

std::string_view to_string(ReductionId id);
/// Throws UnknownReduction.
ReductionId parse_reduction_id(std::string_view text);
std::vector<ReductionId> all_reductions();

/// Single-token variants of the backward maps, used to check that the
/// harness notices broken extraction.
enum class BackwardMutation {
    None,
    /// f(s) = (M+2) + s*(n-1) instead of s*n.
    StrideOffByOne,
    /// EvenColor raised for odd c* and the even branch accepted.
    ParityFlip,
    /// Decoding uses the primes from 3 on instead of from 2.
    PrimeShift,
};

// ---- WOP(X -> X^omega) to ORT ------------------------------------------

struct WopToOrtContext {
    std::size_t k_sigma = 0;
    std::size_t poset_size() const { return 2 * k_sigma + 2; }
};

struct WopToOrtImage {
    OrtInstance instance;
    WopToOrtContext context;
};

/// The color of a pair s = sigma_i, t = sigma_j (i < j): |t| if t is a proper
/// prefix of s, else the first component where they differ.
std::size_t first_difference_color(const OmegaTerm& s, const OmegaTerm& t);

WopToOrtImage wop_to_ort_forward(const OmegaSequence& sigma);

/// Emits sigma_{h_i}(c*) with c* = c(h_0, h_1), tagged with the term it came from.
Stream<Drawn> wop_to_ort_backward(const OmegaSequence& sigma, const Stream<std::size_t>& homogeneous,
                                  BackwardMutation mutation = BackwardMutation::None);

// ---- ORT product ------------------------------------------------------

/// Mixed-radix encoding; the first factor is the most significant digit.
std::size_t encode_product_color(std::span<const std::size_t> sizes, std::span<const std::size_t> parts);
std::vector<std::size_t> decode_product_color(std::span<const std::size_t> sizes, std::size_t color);

FinitePoset product_poset(std::span<const FinitePoset> parts);
OrtInstance ort_product_forward(const std::vector<OrtInstance>& parts);
std::vector<Stream<std::size_t>> ort_product_backward(const Stream<std::size_t>& homogeneous, std::size_t n);

// ---- ORT[n] to ECT^n x WOP(X -> X^n_lex) -------------------------------

/// Stage-by-stage state of the improvement recurrence and the Sigma matrix.
/// Colors are 1-based: j refers to p_j of the fixed linear extension.
class OrtStageEngine {
public:
    explicit OrtStageEngine(OrtInstance instance);

    std::size_t n() const { return n_; }
    const std::vector<std::size_t>& extension() const { return extension_; }
    const OrderRef& order() const { return order_; }

    bool improvement(std::size_t j, std::size_t i) const;
    std::size_t previous(std::size_t j, std::size_t i) const;
    /// k_j^i, defined iff p_j improves at stage i >= 1.
    std::optional<std::size_t> witness(std::size_t j, std::size_t i) const;
    LexTuple row(std::size_t i) const;
    const Element& entry(std::size_t j, std::size_t i) const;
    std::vector<std::size_t> improving(std::size_t i) const;
    /// m^i_j for j in I^i (0 elsewhere), indexed j-1.
    std::vector<std::size_t> m_values(std::size_t i) const;
    std::size_t stages_computed() const;

private:
    struct Stage {
        std::vector<bool> improvement;
        std::vector<std::size_t> previous;      // previous_j(i)
        std::vector<std::size_t> previous_next; // previous_j(i+1)
        std::vector<std::optional<std::size_t>> witness;
        std::vector<std::size_t> m;
        std::vector<Element> entries;          // a_j^i at index j-1
    };

    const Stage& stage(std::size_t i) const;
    void compute_next() const;

    OrtInstance instance_;
    std::size_t n_;
    std::vector<std::size_t> extension_;
    std::vector<std::size_t> rank_;  // rank_[color] = j
    OrderRef order_;
    mutable std::recursive_mutex mutex_;
    mutable std::deque<Stage> stages_;
};

struct EctWopImage {
    std::vector<UnaryColorStream> improvements;
    LexSequence sigma;
    std::shared_ptr<const OrtStageEngine> engine;
};

EctWopImage ort_to_ectwop_forward(const OrtInstance& instance);

struct ExtractionParams {
    std::size_t n = 0;
    std::uint64_t n0 = 0;
    std::uint64_t m = 0;
    std::uint64_t stride = 0;

    static ExtractionParams from_bounds(std::size_t n, std::span<const std::uint64_t> bounds,
                                        BackwardMutation mutation = BackwardMutation::None);
    std::uint64_t f(std::uint64_t s) const { return (m + 2) + s * stride; }
};

/// y_s = 1/x_{f(s)}(3) - 1.
Stream<std::size_t> ort_to_ectwop_backward(std::size_t n, std::span<const std::uint64_t> bounds,
                                           const Stream<Drawn>& x,
                                           BackwardMutation mutation = BackwardMutation::None);

// ---- WOP(X -> X^n_lex) to WOP(X -> X^omega) ----------------------------

OmegaTerm lex_to_omega_term(const OrderRef& order, const LexTuple& row);
OmegaSequence lex_to_omega_forward(const LexSequence& sigma);
/// Every solution for the image is already a solution for the source.
inline Stream<Drawn> lex_to_omega_backward(const Stream<Drawn>& x) { return x; }

// ---- TC_N^n to WOP(X -> X^{2^n}_lex) ------------------------------------

inline constexpr std::size_t kDefaultStageBudget = 200;
inline constexpr std::size_t kMaxTcnWidth = 4;

/// The m-th prime, 1-based.
std::uint64_t nth_prime(std::size_t m);

struct TcnStage {
    std::vector<std::uint64_t> guesses;  // g_m(i), index m-1
    Subset u = 0;
    CycleStep cycle;
    std::vector<BigInt> counts;          // count_j(i), index j-1
    Element value;                       // a_{j_i}^i
    LexTuple row;
};

class TcnStageEngine {
public:
    TcnStageEngine(std::vector<EnumerationStream> e, std::size_t stage_budget);

    std::size_t n() const { return n_; }
    std::size_t width() const { return std::size_t{1} << n_; }
    std::size_t stage_budget() const { return budget_; }
    const std::vector<Subset>& subsets() const { return order_; }
    /// Throws StageBudgetExceeded past the budget.
    const TcnStage& stage(std::size_t i) const;
    std::size_t stages_computed() const;

private:
    void compute_next() const;

    std::vector<EnumerationStream> e_;
    std::size_t n_;
    std::size_t budget_;
    std::vector<Subset> order_;
    mutable std::recursive_mutex mutex_;
    mutable std::deque<TcnStage> stages_;
    mutable ResetState resets_;
    mutable std::vector<std::vector<bool>> seen_;  // per coordinate, values enumerated so far
    mutable BigInt running_max_;
    mutable std::vector<BigInt> next_counts_;
};

struct TcnLexImage {
    LexSequence sigma;
    std::shared_ptr<const TcnStageEngine> engine;
};

TcnLexImage tcn_to_lex_forward(const std::vector<EnumerationStream>& e,
                               std::size_t stage_budget = kDefaultStageBudget);

/// count + 1/(p_1^{g_1} ... p_n^{g_n} p_{n+1}^i); the last factor is omitted at stage 0.
Rational tcn_encode(const BigInt& count, std::span<const std::uint64_t> guesses, std::size_t stage);
/// Inverse of the fractional part: returns the exponents of p_1..p_n.
std::vector<std::uint64_t> tcn_decode(std::size_t n, const Rational& a,
                                      BackwardMutation mutation = BackwardMutation::None);
/// Decodes the first finite term among the first `scan_limit` elements of x.
std::vector<std::uint64_t> tcn_to_lex_backward(std::size_t n, const Stream<Drawn>& x,
                                               BackwardMutation mutation = BackwardMutation::None,
                                               std::size_t scan_limit = 64);

}  // namespace wopbench
