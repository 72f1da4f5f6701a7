#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wopbench/order.hpp"

namespace wopbench {

/// One input or output channel of a functional: a finite prefix of symbols.
using Tape = std::vector<Element>;
using Tapes = std::vector<Tape>;

/// A map from finite input prefixes (one per tape) to a finite output prefix.
/// An empty or short output means "needs more input".
class ContinuousFunctional {
public:
    using Fn = std::function<Tape(const Tapes&)>;

    ContinuousFunctional() = default;
    ContinuousFunctional(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

    const std::string& name() const { return name_; }
    Tape operator()(const Tapes& input) const { return fn_(input); }

private:
    std::string name_;
    Fn fn_;
};

enum class Actor { H, K, Adv };
std::string_view to_string(Actor a);

enum class VerdictKind { RefutationFound, BudgetExhausted, CandidateIllFormed };
std::string_view to_string(VerdictKind v);

/// A finite, self-contained witness that K answered wrongly.
struct Refutation {
    std::string contract;
    /// The exact K input and the output K committed to on it.
    Tapes k_input;
    Tape committed;
    /// Instance description needed to re-evaluate the contract.
    nlohmann::json evidence;
};

struct Verdict {
    VerdictKind kind = VerdictKind::BudgetExhausted;
    std::string reason;
    std::optional<Refutation> refutation;
    std::vector<nlohmann::json> transcript;
    std::uint64_t fuel_used = 0;
};

enum class AdversaryKind { WopEct, LexLpo, IsFiniteWop };
std::string_view to_string(AdversaryKind a);
/// Throws UnknownCandidate.
AdversaryKind parse_adversary(std::string_view text);

inline constexpr std::size_t kMaxLpoQueries = 8;

Verdict adversary_wop_ect(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel);
/// Throws ExponentOverflow when H asks more than max_queries questions.
Verdict adversary_lex_lpo(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel,
                          std::size_t max_queries = kMaxLpoQueries);
Verdict adversary_isfinite_wop(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel);

struct Candidate {
    std::string id;
    AdversaryKind which;
    std::string description;
    ContinuousFunctional h;
    ContinuousFunctional k;
    /// Outcome at fuel 10^6.
    VerdictKind expected;
};

const std::vector<Candidate>& candidate_catalog();
/// Throws UnknownCandidate.
const Candidate& find_candidate(AdversaryKind which, std::string_view id);

Verdict run_duel(const Candidate& c, std::uint64_t fuel);

/// Re-runs K on the recorded input and re-evaluates the violated contract
/// directly, without replaying the adversary. `why` receives the failure.
bool check_refutation(const Candidate& c, const Refutation& r, std::string* why = nullptr);

// ---- pieces exposed for testing ----------------------------------------

/// The staged instances tau^j of the lex diagonalizations.
struct StagedFamily {
    AdversaryKind kind = AdversaryKind::WopEct;
    /// i_0 < i_1 < ...: rows up to i_l are frozen once stage l+1 starts.
    std::vector<std::size_t> switches;
    std::size_t stage = 0;

    OrderRef order() const;
    /// Row i as a tape symbol (a tuple (a_2, a_1)).
    Element row(std::size_t i) const;
    Tape rows(std::size_t count) const;
    /// Infimum of the only infinite descending chains of the family.
    Element limit() const;
    nlohmann::json to_json() const;
    static StagedFamily from_json(const nlohmann::json& j);
};

/// K-output symbols are tuples (value, term index).
Element encode_drawn(const Drawn& d);
Drawn decode_drawn(const Element& e);

/// Whether `prefix` extends to an infinite solution for the family: it must be
/// strictly descending, drawn from the rows in order, and end above the limit.
bool extendable_in(const StagedFamily& family, const std::vector<Drawn>& prefix, std::string* why = nullptr);

/// Omega-term instance symbols: tuples of (exponent, coefficient) pairs over Q.
Element encode_term(const OmegaTerm& t);
OmegaTerm decode_term(const OrderRef& x, const Element& e);

/// Desk WOP solver for a finite prefix of an omega-power instance: guesses the
/// eventual pair color from the second half of the window and returns the
/// earliest greedy homogeneous chain that reaches the last quarter.
std::vector<Drawn> desk_wop_solution(const std::vector<OmegaTerm>& terms);

}  // namespace wopbench
