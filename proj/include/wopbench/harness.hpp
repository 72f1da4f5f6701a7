#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wopbench/problems.hpp"
#include "wopbench/reductions.hpp"

namespace wopbench {

inline constexpr int kReportSchema = 1;

struct RunConfig {
    std::string reduction = "wop-to-ort";
    std::size_t trials = 100;
    std::size_t depth = 256;
    std::uint64_t seed = 0;
    std::size_t stage_budget = kDefaultStageBudget;
    std::uint64_t fuel = 1'000'000;
    std::string output_path;
    BackwardMutation mutation = BackwardMutation::None;
    /// Worker threads for independent trials; 0 picks the hardware count.
    std::size_t threads = 0;

    // lemma-vi
    std::size_t n = 3;
    std::size_t stages = 500;

    // adversary
    std::string which;
    std::string candidate;

    // oracle-cnf
    std::uint64_t alpha = 2;
    std::size_t max_pairs = 3;
    std::uint64_t max_exp = 4;
};

struct TrialRecord {
    std::size_t id = 0;
    std::string verdict;
    std::string detail;
    /// Replay fixture of the source instance; null for passing trials.
    nlohmann::json fixture;
};

struct Report {
    std::string command;
    nlohmann::json config;
    std::vector<TrialRecord> trials;
    bool pass = true;
    double wall_ms = 0.0;
    /// Adversary runs only: the JSON-lines event log.
    std::vector<nlohmann::json> transcript;
};

nlohmann::json to_json(const Report& r);
/// Timing fields removed; two runs of one config must agree on this.
nlohmann::json deterministic_view(const Report& r);

std::string_view to_string(BackwardMutation m);
BackwardMutation parse_mutation(std::string_view text);

// ---- certified solving ------------------------------------------------

/// ECT: the bound; TC_N: least withheld element per coordinate (0 when the
/// range is N); WOP: the planted witness; ORT: the planted homogeneous set.
using SolutionStream = std::variant<EctSolution, TcnSolution, Stream<Drawn>, Stream<std::size_t>>;

/// Throws CertificateMismatch when the certificate kind does not fit the tag.
SolutionStream certified_solve(ProblemTag tag, const Instance& instance, const Certificate& certificate);

/// Ground truth for the ORT[n] pipeline, derived from a staircase schedule.
struct OrtPipelineCert {
    std::size_t j_star = 0;
    std::size_t i_star = 0;
    /// p_{j*} as a poset index.
    std::size_t color = 0;
    std::vector<std::uint64_t> ect_bounds;
    std::vector<EctCert> ect_certs;
    std::vector<bool> infinitely_often;
    std::vector<std::size_t> last_improvement;
    std::size_t cycle_start = 0;
    std::size_t cycle_length = 0;
};

/// Runs the improvement recurrence until its abstract state repeats; past the
/// schedule's threshold the state determines every later stage.
OrtPipelineCert transport_ort_certificate(const EctWopImage& image, const StaircaseSchedule& schedule,
                                          std::size_t horizon = 200'000);

/// A solution for the Sigma stream: a greedy prefix from the columns left of
/// j*, then every strict descent in column j* from row i* on.
Stream<Drawn> certified_sigma_solution(const EctWopImage& image, const OrtPipelineCert& cert);

/// Proof-internal markers of a TC_N -> lex run, recovered from the withheld sets.
struct TcnRunCert {
    Subset a_y = 0;
    std::size_t y = 0;
    std::int64_t i_star = -1;
    std::int64_t i_double_star = -1;
    std::vector<std::size_t> y_stages;  // i_0 < i_1 < ... within the budget
};

TcnRunCert transport_tcn_certificate(const TcnLexImage& image, const TcnCert& cert);
std::vector<Drawn> certified_tcn_solution(const TcnLexImage& image, const TcnRunCert& cert);

// ---- runners ------------------------------------------------------------

Report run_verify(const RunConfig& config);
Report run_lemma_vi(const RunConfig& config);
Report run_adversary(const RunConfig& config);
/// Exhaustive agreement of cmp_omega_power with the Cantor-normal-form oracle
/// over chain(alpha): every term with at most max_pairs pairs and exponents
/// below max_exp, every ordered pair compared.
Report run_oracle_cnf(const RunConfig& config);

/// All terms over chain(alpha) with at most max_pairs pairs and exponents < max_exp.
std::vector<OmegaTerm> enumerate_terms(std::uint64_t alpha, std::size_t max_pairs, std::uint64_t max_exp);

/// Writes the JSON report when config.output_path is set.
void write_report(const Report& report, const std::string& path);

}  // namespace wopbench
