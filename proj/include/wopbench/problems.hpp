#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wopbench/order.hpp"
#include "wopbench/stream.hpp"

namespace wopbench {

/// A finite poset stored as an explicit n x n table of <=.
class FinitePoset {
public:
    FinitePoset() = default;
    /// `leq` is row-major: leq[a * n + b] iff a <= b. Throws NotAPartialOrder.
    FinitePoset(std::size_t n, std::vector<bool> leq);

    static FinitePoset chain(std::size_t n);
    /// 0 > 1 > ... > n-1.
    static FinitePoset reversed_chain(std::size_t n);
    static FinitePoset antichain(std::size_t n);
    /// Reflexive-transitive closure of the given strict relations.
    static FinitePoset from_covers(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& less);

    std::size_t size() const { return n_; }
    bool leq(std::size_t a, std::size_t b) const { return leq_[a * n_ + b]; }
    bool lt(std::size_t a, std::size_t b) const { return a != b && leq(a, b); }
    const std::vector<bool>& table() const { return leq_; }
    /// Number of ordered pairs (a, b) with a <= b, reflexive ones included.
    std::size_t related_pairs() const;

    friend bool operator==(const FinitePoset&, const FinitePoset&) = default;

private:
    std::size_t n_ = 0;
    std::vector<bool> leq_;
};

bool is_partial_order(std::size_t n, const std::vector<bool>& leq);

/// Total order extending <=_P: repeatedly removes the lowest-index minimal
/// element. Returns poset indices p_1, ..., p_n.
std::vector<std::size_t> linear_extension(const FinitePoset& p);

/// A deterministic pair coloring c(i, j), i < j, with values in [0, n_colors).
class ColoringStream {
public:
    using Fn = std::function<std::size_t(std::size_t, std::size_t)>;

    ColoringStream() = default;
    ColoringStream(std::size_t n_colors, Fn fn, bool memoize = true);

    std::size_t n_colors() const { return n_colors_; }
    /// Throws ColorOutOfRange if the underlying function leaves the palette.
    std::size_t operator()(std::size_t i, std::size_t j) const;

private:
    struct Memo;
    std::size_t n_colors_ = 0;
    Fn fn_;
    std::shared_ptr<Memo> memo_;
};

struct OrtInstance {
    FinitePoset poset;
    ColoringStream coloring;
};

struct UnaryColorStream {
    std::size_t n_colors = 0;
    Stream<std::size_t> values;

    std::size_t at(std::size_t i) const { return values.at(i); }
};

struct EnumerationStream {
    Stream<std::uint64_t> values;

    std::uint64_t at(std::size_t i) const { return values.at(i); }
};

/// Instance of WOP(X -> X^omega).
struct OmegaSequence {
    OrderRef order;
    Stream<OmegaTerm> terms;
};

/// Instance of WOP(X -> X^n_lex).
struct LexSequence {
    OrderRef order;
    std::size_t width = 0;
    Stream<LexTuple> rows;
};

enum class ProblemTag { Ect, Tcn, WopOmega, WopLex, Ort };

std::string_view to_string(ProblemTag tag);
ProblemTag parse_problem_tag(std::string_view text);

struct EctCert {
    std::uint64_t stabilization_index = 0;
    std::vector<std::size_t> tail_palette;
};

/// Planted layout of a staircase coloring: for x >= threshold the colors
/// depend only on x mod period and y - x; every x < threshold reaches its
/// final color by y = x + max_prefix_step.
struct StaircaseSchedule {
    std::size_t threshold = 0;
    std::size_t period = 1;
    std::size_t max_prefix_step = 1;
    std::size_t max_period_step = 1;
    std::size_t planted_residue = 0;
};

struct OrtCert {
    std::size_t true_color = 0;
    Stream<std::size_t> homogeneous;
    std::optional<StaircaseSchedule> schedule;
};

struct TcnCert {
    /// Per coordinate; an empty set means the enumeration covers all of N.
    std::vector<std::vector<std::uint64_t>> withheld;
};

struct WopCert {
    /// Component index (omega terms) or column j (lex tuples) that descends forever.
    std::size_t planted_position = 0;
    Stream<Drawn> witness;
};

using Certificate = std::variant<EctCert, OrtCert, TcnCert, WopCert>;
using Instance = std::variant<UnaryColorStream, std::vector<EnumerationStream>, OmegaSequence, LexSequence, OrtInstance>;

enum class OrtFamily { Staircase, WopImage };

struct GenParams {
    /// Colors (ECT), coordinates (TC_N), width (lex WOP), poset size (staircase ORT).
    std::size_t n = 3;
    /// Base order for WOP families and the wop-image ORT family: "Q", "Z*" or "composite".
    std::string order = "Q";
    OrtFamily ort_family = OrtFamily::Staircase;
    /// When set, staircase geometry (threshold, period, planted residue) is drawn
    /// from this seed so that several instances share a homogeneous set.
    std::optional<std::uint64_t> schedule_seed;
    /// TC_N: force every coordinate to withhold nothing (range = N).
    bool full_range = false;

    friend bool operator==(const GenParams&, const GenParams&) = default;
};

struct CertifiedInstance {
    ProblemTag tag = ProblemTag::Ect;
    std::uint64_t seed = 0;
    GenParams params;
    Instance instance;
    Certificate certificate;
};

/// Deterministic in (tag, seed, params). Throws ParamsOutOfRange.
CertifiedInstance gen_certified_instance(ProblemTag tag, std::uint64_t seed, const GenParams& params);

inline constexpr std::size_t kDefaultValidationDepth = 256;

struct ValidationReport {
    std::size_t checked_depth = 0;
    bool ok = true;
    /// Earliest violating indices (pair, triple or single index).
    std::vector<std::size_t> counterexample;
    std::string detail;
    double elapsed_ms = 0.0;
};

ValidationReport validate_right_ordered(const FinitePoset& p, const ColoringStream& c, std::size_t depth);
ValidationReport validate_descending(const OmegaSequence& s, std::size_t depth);
ValidationReport validate_descending(const LexSequence& s, std::size_t depth);

ValidationReport validate_ort_solution(const OrtInstance& inst, std::span<const std::size_t> prefix);
ValidationReport validate_wop_solution(const OmegaSequence& inst, std::span<const Drawn> prefix);
ValidationReport validate_wop_solution(const LexSequence& inst, std::span<const Drawn> prefix);
/// The bound is accepted iff every color seen after it (scanned up to the
/// certified index plus depth) belongs to the certified tail palette.
ValidationReport validate_ect_solution(const UnaryColorStream& inst, const EctCert& cert, std::uint64_t bound,
                                       std::size_t depth = kDefaultValidationDepth);
ValidationReport validate_tcn_solution(const TcnCert& cert, std::span<const std::uint64_t> proposed);

struct EctSolution {
    std::uint64_t bound = 0;
};
struct TcnSolution {
    std::vector<std::uint64_t> values;
};
struct WopSolution {
    std::vector<Drawn> drawn;
};
struct OrtSolution {
    std::vector<std::size_t> indices;
};
using SolutionPrefix = std::variant<EctSolution, TcnSolution, WopSolution, OrtSolution>;

/// Dispatches on the instance tag; throws UnknownTag when the solution kind
/// does not belong to the instance's problem.
ValidationReport validate_solution_prefix(const CertifiedInstance& ci, const SolutionPrefix& prefix,
                                          std::size_t depth = kDefaultValidationDepth);

/// Fixture: {tag, seed, params, certificate, prefix_sample}.
nlohmann::json to_fixture(const CertifiedInstance& ci, std::size_t sample = 16);
/// Regenerates from (tag, seed, params) and checks the stored sample matches;
/// throws CertificateMismatch otherwise.
CertifiedInstance from_fixture(const nlohmann::json& fixture);

nlohmann::json params_to_json(const GenParams& p);
GenParams params_from_json(const nlohmann::json& j);

}  // namespace wopbench
