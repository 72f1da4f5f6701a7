#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wopbench/adversary.hpp"
#include "wopbench/error.hpp"
#include "wopbench/harness.hpp"

using namespace wopbench;

namespace {

void print_summary(const Report& r) {
    if (r.command == "adversary" || r.command == "oracle-cnf") {
        for (const auto& t : r.trials) std::cout << t.verdict << ": " << t.detail << "\n";
    } else {
        std::size_t failed = 0;
        for (const auto& t : r.trials) {
            if (t.verdict == "pass") continue;
            if (++failed <= 10) std::cout << "trial " << t.id << ": " << t.verdict << " " << t.detail << "\n";
        }
        if (failed > 10) std::cout << "... " << failed - 10 << " more failing trials\n";
    }
    std::cout << r.command << " " << (r.pass ? "PASS" : "FAIL") << " (" << r.trials.size() << " trial"
              << (r.trials.size() == 1 ? "" : "s") << ", " << static_cast<long long>(r.wall_ms) << " ms)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weihrauch reduction test bench"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string mutation = "none";
    std::string transcript_path;

    auto* verify = app.add_subcommand("verify", "run a reduction end to end on certified instances");
    verify->add_option("--reduction", cfg.reduction, "reduction id")->required();
    verify->add_option("--trials", cfg.trials)->capture_default_str();
    verify->add_option("--depth", cfg.depth)->capture_default_str();
    verify->add_option("--seed", cfg.seed)->required();
    verify->add_option("--stage-budget", cfg.stage_budget)->capture_default_str();
    verify->add_option("--mutation", mutation, "none | stride | parity | prime-shift")->capture_default_str();
    verify->add_option("--threads", cfg.threads, "0 = hardware concurrency")->capture_default_str();
    verify->add_option("--json", cfg.output_path, "write the report here");

    auto* lemma = app.add_subcommand("lemma-vi", "check the cycle-completion lemma against brute force");
    lemma->add_option("--n", cfg.n)->capture_default_str();
    lemma->add_option("--stages", cfg.stages)->capture_default_str();
    lemma->add_option("--trials", cfg.trials)->capture_default_str();
    lemma->add_option("--seed", cfg.seed)->required();
    lemma->add_option("--threads", cfg.threads)->capture_default_str();
    lemma->add_option("--json", cfg.output_path);

    auto* adv = app.add_subcommand("adversary", "duel a built-in candidate reduction");
    adv->add_option("--which", cfg.which)->required()->check(CLI::IsMember({"wop-ect", "lex-lpo", "isfinite-wop"}));
    adv->add_option("--candidate", cfg.candidate)->required();
    adv->add_option("--fuel", cfg.fuel)->capture_default_str();
    adv->add_option("--json", cfg.output_path);
    adv->add_option("--transcript", transcript_path, "write the event log as JSON lines");

    auto* cnf = app.add_subcommand("oracle-cnf", "compare term order with the Cantor normal form oracle");
    cnf->add_option("--alpha", cfg.alpha)->capture_default_str();
    cnf->add_option("--max-pairs", cfg.max_pairs)->capture_default_str();
    cnf->add_option("--max-exp", cfg.max_exp)->capture_default_str();
    cnf->add_option("--json", cfg.output_path);

    bool list = false;
    auto* cands = app.add_subcommand("candidates", "list the adversary candidate catalog");
    cands->callback([&] { list = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.mutation = parse_mutation(mutation);
        Report r;
        if (list) {
            for (const auto& c : candidate_catalog()) {
                std::cout << to_string(c.which) << " " << c.id << " [" << to_string(c.expected) << "] " << c.description
                          << "\n";
            }
            return 0;
        } else if (verify->parsed()) {
            r = run_verify(cfg);
        } else if (lemma->parsed()) {
            r = run_lemma_vi(cfg);
        } else if (adv->parsed()) {
            r = run_adversary(cfg);
            if (!transcript_path.empty()) {
                std::ofstream out(transcript_path);
                for (const auto& ev : r.transcript) out << ev.dump() << "\n";
            }
        } else {
            r = run_oracle_cnf(cfg);
        }
        if (!cfg.output_path.empty()) write_report(r, cfg.output_path);
        print_summary(r);
        return r.pass ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
