#include "wopbench/problems.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <unordered_map>

#include "wopbench/error.hpp"

namespace wopbench {

namespace {

using Clock = std::chrono::steady_clock;

double since_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ValidationReport violation(std::size_t depth, std::vector<std::size_t> where, std::string detail, Clock::time_point start) {
    ValidationReport r;
    r.checked_depth = depth;
    r.ok = false;
    r.counterexample = std::move(where);
    r.detail = std::move(detail);
    r.elapsed_ms = since_ms(start);
    return r;
}

ValidationReport passed(std::size_t depth, Clock::time_point start) {
    ValidationReport r;
    r.checked_depth = depth;
    r.elapsed_ms = since_ms(start);
    return r;
}

}  // namespace

bool is_partial_order(std::size_t n, const std::vector<bool>& leq) {
    if (leq.size() != n * n) return false;
    auto at = [&](std::size_t a, std::size_t b) { return leq[a * n + b]; };
    for (std::size_t a = 0; a < n; ++a) {
        if (!at(a, a)) return false;
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && at(a, b) && at(b, a)) return false;
            for (std::size_t c = 0; c < n; ++c) {
                if (at(a, b) && at(b, c) && !at(a, c)) return false;
            }
        }
    }
    return true;
}

FinitePoset::FinitePoset(std::size_t n, std::vector<bool> leq) : n_(n), leq_(std::move(leq)) {
    if (n_ == 0) throw Error(ErrorCode::NotAPartialOrder, "empty poset");
    if (!is_partial_order(n_, leq_)) throw Error(ErrorCode::NotAPartialOrder, "relation table is not a partial order");
}

FinitePoset FinitePoset::chain(std::size_t n) {
    std::vector<bool> t(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) t[a * n + b] = true;
    return FinitePoset(n, std::move(t));
}

FinitePoset FinitePoset::reversed_chain(std::size_t n) {
    std::vector<bool> t(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) t[a * n + b] = true;
    return FinitePoset(n, std::move(t));
}

FinitePoset FinitePoset::antichain(std::size_t n) {
    std::vector<bool> t(n * n);
    for (std::size_t a = 0; a < n; ++a) t[a * n + a] = true;
    return FinitePoset(n, std::move(t));
}

FinitePoset FinitePoset::from_covers(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& less) {
    std::vector<bool> t(n * n);
    for (std::size_t a = 0; a < n; ++a) t[a * n + a] = true;
    for (auto [a, b] : less) {
        if (a >= n || b >= n) throw Error(ErrorCode::NotAPartialOrder, "cover outside the carrier");
        t[a * n + b] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (t[a * n + k] && t[k * n + b]) t[a * n + b] = true;
    return FinitePoset(n, std::move(t));
}

std::size_t FinitePoset::related_pairs() const {
    return static_cast<std::size_t>(std::count(leq_.begin(), leq_.end(), true));
}

std::vector<std::size_t> linear_extension(const FinitePoset& p) {
    if (!is_partial_order(p.size(), p.table())) throw Error(ErrorCode::NotAPartialOrder, "invalid poset");
    const std::size_t n = p.size();
    std::vector<bool> taken(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    while (order.size() < n) {
        for (std::size_t a = 0; a < n; ++a) {
            if (taken[a]) continue;
            bool minimal = true;
            for (std::size_t b = 0; b < n && minimal; ++b) {
                if (!taken[b] && p.lt(b, a)) minimal = false;
            }
            if (minimal) {
                taken[a] = true;
                order.push_back(a);
                break;
            }
        }
    }
    return order;
}

struct ColoringStream::Memo {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, std::size_t> values;
};

ColoringStream::ColoringStream(std::size_t n_colors, Fn fn, bool memoize)
    : n_colors_(n_colors), fn_(std::move(fn)), memo_(memoize ? std::make_shared<Memo>() : nullptr) {}

std::size_t ColoringStream::operator()(std::size_t i, std::size_t j) const {
    if (i >= j) throw Error(ErrorCode::InvalidElement, "coloring is defined on pairs i < j only");
    const auto key = (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j);
    if (memo_) {
        std::lock_guard lock(memo_->mutex);
        if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    const std::size_t color = fn_(i, j);
    if (color >= n_colors_) {
        throw Error(ErrorCode::ColorOutOfRange, "c(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                                    std::to_string(color) + " with " + std::to_string(n_colors_) +
                                                    " colors");
    }
    if (memo_) {
        std::lock_guard lock(memo_->mutex);
        memo_->values.emplace(key, color);
    }
    return color;
}

std::string_view to_string(ProblemTag tag) {
    switch (tag) {
        case ProblemTag::Ect: return "ECT";
        case ProblemTag::Tcn: return "TC_N";
        case ProblemTag::WopOmega: return "WOP_OMEGA";
        case ProblemTag::WopLex: return "WOP_LEX";
        case ProblemTag::Ort: return "ORT";
    }
    return "?";
}

ProblemTag parse_problem_tag(std::string_view text) {
    for (auto tag : {ProblemTag::Ect, ProblemTag::Tcn, ProblemTag::WopOmega, ProblemTag::WopLex, ProblemTag::Ort}) {
        if (to_string(tag) == text) return tag;
    }
    throw Error(ErrorCode::UnknownTag, std::string(text));
}

ValidationReport validate_right_ordered(const FinitePoset& p, const ColoringStream& c, std::size_t depth) {
    const auto start = Clock::now();
    if (depth < 2) throw Error(ErrorCode::ParamsOutOfRange, "depth must be at least 2");
    std::vector<std::size_t> row(depth);
    for (std::size_t x = 0; x + 1 < depth; ++x) {
        for (std::size_t y = x + 1; y < depth; ++y) {
            row[y] = c(x, y);
            if (row[y] >= p.size()) {
                throw Error(ErrorCode::ColorOutOfRange, "color " + std::to_string(row[y]) + " outside poset");
            }
        }
        for (std::size_t y = x + 1; y < depth; ++y) {
            for (std::size_t y2 = y; y2 < depth; ++y2) {
                if (!p.leq(row[y], row[y2])) {
                    return violation(depth, {x, y, y2},
                                     "c(" + std::to_string(x) + "," + std::to_string(y) + ")=" + std::to_string(row[y]) +
                                         " not <=_P c(" + std::to_string(x) + "," + std::to_string(y2) +
                                         ")=" + std::to_string(row[y2]),
                                     start);
                }
            }
        }
    }
    return passed(depth, start);
}

ValidationReport validate_descending(const OmegaSequence& s, std::size_t depth) {
    const auto start = Clock::now();
    if (depth < 2) throw Error(ErrorCode::ParamsOutOfRange, "depth must be at least 2");
    for (std::size_t i = 1; i < depth; ++i) {
        if (cmp_omega_power(*s.order, s.terms.at(i), s.terms.at(i - 1)) != Ordering::Less) {
            return violation(depth, {i}, format(s.terms.at(i)) + " is not below " + format(s.terms.at(i - 1)), start);
        }
    }
    return passed(depth, start);
}

ValidationReport validate_descending(const LexSequence& s, std::size_t depth) {
    const auto start = Clock::now();
    if (depth < 2) throw Error(ErrorCode::ParamsOutOfRange, "depth must be at least 2");
    for (std::size_t i = 1; i < depth; ++i) {
        if (cmp_lex_tuple(*s.order, s.rows.at(i), s.rows.at(i - 1)) != Ordering::Less) {
            return violation(depth, {i}, format(s.rows.at(i)) + " is not below " + format(s.rows.at(i - 1)), start);
        }
    }
    return passed(depth, start);
}

ValidationReport validate_ort_solution(const OrtInstance& inst, std::span<const std::size_t> prefix) {
    const auto start = Clock::now();
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] <= prefix[i - 1]) return violation(prefix.size(), {i}, "set is not strictly increasing", start);
    }
    if (prefix.size() < 2) return passed(prefix.size(), start);
    const auto color = inst.coloring(prefix[0], prefix[1]);
    for (std::size_t a = 0; a < prefix.size(); ++a) {
        for (std::size_t b = a + 1; b < prefix.size(); ++b) {
            const auto got = inst.coloring(prefix[a], prefix[b]);
            if (got != color) {
                return violation(prefix.size(), {a, b},
                                 "c(" + std::to_string(prefix[a]) + "," + std::to_string(prefix[b]) + ")=" +
                                     std::to_string(got) + " but the first pair has color " + std::to_string(color),
                                 start);
            }
        }
    }
    return passed(prefix.size(), start);
}

namespace {

template <typename Seq, typename Term>
ValidationReport validate_wop_impl(const LinearOrder& x, const Seq& terms, std::span<const Drawn> prefix) {
    const auto start = Clock::now();
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (x.compare(prefix[i].value, prefix[i - 1].value) != Ordering::Less) {
            return violation(prefix.size(), {i}, "solution is not strictly descending at " + std::to_string(i), start);
        }
    }
    std::size_t needed = 0;
    for (const auto& d : prefix) needed = std::max(needed, d.term + 1);
    std::vector<Term> window;
    window.reserve(needed);
    for (std::size_t i = 0; i < needed; ++i) window.push_back(terms.at(i));
    if (is_contained(x, prefix, std::span<const Term>(window))) return passed(prefix.size(), start);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (!is_contained(x, prefix.subspan(0, i + 1), std::span<const Term>(window))) {
            return violation(prefix.size(), {i}, "element " + std::to_string(i) + " (" + format(prefix[i].value) +
                                                     ") is not drawn from term " + std::to_string(prefix[i].term) +
                                                     " in order",
                             start);
        }
    }
    return violation(prefix.size(), {}, "solution is not contained in the sequence", start);
}

}  // namespace

ValidationReport validate_wop_solution(const OmegaSequence& inst, std::span<const Drawn> prefix) {
    return validate_wop_impl<Stream<OmegaTerm>, OmegaTerm>(*inst.order, inst.terms, prefix);
}

ValidationReport validate_wop_solution(const LexSequence& inst, std::span<const Drawn> prefix) {
    return validate_wop_impl<Stream<LexTuple>, LexTuple>(*inst.order, inst.rows, prefix);
}

ValidationReport validate_ect_solution(const UnaryColorStream& inst, const EctCert& cert, std::uint64_t bound,
                                       std::size_t depth) {
    const auto start = Clock::now();
    const std::size_t horizon = static_cast<std::size_t>(std::max(cert.stabilization_index, bound)) + depth;
    for (std::size_t x = static_cast<std::size_t>(bound) + 1; x <= horizon; ++x) {
        const auto color = inst.at(x);
        if (std::find(cert.tail_palette.begin(), cert.tail_palette.end(), color) == cert.tail_palette.end()) {
            return violation(horizon, {x},
                             "color " + std::to_string(color) + " at " + std::to_string(x) +
                                 " never recurs, so " + std::to_string(bound) + " is not a bound",
                             start);
        }
    }
    return passed(horizon, start);
}

ValidationReport validate_tcn_solution(const TcnCert& cert, std::span<const std::uint64_t> proposed) {
    const auto start = Clock::now();
    if (proposed.size() != cert.withheld.size()) {
        return violation(proposed.size(), {}, "expected " + std::to_string(cert.withheld.size()) + " answers", start);
    }
    for (std::size_t m = 0; m < proposed.size(); ++m) {
        const auto& w = cert.withheld[m];
        if (w.empty()) continue;
        if (std::find(w.begin(), w.end(), proposed[m]) == w.end()) {
            return violation(proposed.size(), {m},
                             "coordinate " + std::to_string(m + 1) + ": " + std::to_string(proposed[m]) +
                                 " is enumerated",
                             start);
        }
    }
    return passed(proposed.size(), start);
}

ValidationReport validate_solution_prefix(const CertifiedInstance& ci, const SolutionPrefix& prefix, std::size_t depth) {
    auto mismatch = [&]() -> ValidationReport {
        throw Error(ErrorCode::UnknownTag, "solution kind does not match problem " + std::string(to_string(ci.tag)));
    };
    switch (ci.tag) {
        case ProblemTag::Ect: {
            const auto* s = std::get_if<EctSolution>(&prefix);
            if (!s) return mismatch();
            return validate_ect_solution(std::get<UnaryColorStream>(ci.instance), std::get<EctCert>(ci.certificate),
                                         s->bound, depth);
        }
        case ProblemTag::Tcn: {
            const auto* s = std::get_if<TcnSolution>(&prefix);
            if (!s) return mismatch();
            return validate_tcn_solution(std::get<TcnCert>(ci.certificate), s->values);
        }
        case ProblemTag::WopOmega: {
            const auto* s = std::get_if<WopSolution>(&prefix);
            if (!s) return mismatch();
            return validate_wop_solution(std::get<OmegaSequence>(ci.instance), s->drawn);
        }
        case ProblemTag::WopLex: {
            const auto* s = std::get_if<WopSolution>(&prefix);
            if (!s) return mismatch();
            return validate_wop_solution(std::get<LexSequence>(ci.instance), s->drawn);
        }
        case ProblemTag::Ort: {
            const auto* s = std::get_if<OrtSolution>(&prefix);
            if (!s) return mismatch();
            return validate_ort_solution(std::get<OrtInstance>(ci.instance), s->indices);
        }
    }
    return mismatch();
}

nlohmann::json params_to_json(const GenParams& p) {
    nlohmann::json j{{"n", p.n},
                     {"order", p.order},
                     {"ort_family", p.ort_family == OrtFamily::Staircase ? "staircase" : "wop-image"},
                     {"full_range", p.full_range}};
    j["schedule_seed"] = p.schedule_seed ? nlohmann::json(*p.schedule_seed) : nlohmann::json(nullptr);
    return j;
}

GenParams params_from_json(const nlohmann::json& j) {
    GenParams p;
    try {
        p.n = j.at("n").get<std::size_t>();
        p.order = j.at("order").get<std::string>();
        const auto family = j.at("ort_family").get<std::string>();
        if (family == "staircase") {
            p.ort_family = OrtFamily::Staircase;
        } else if (family == "wop-image") {
            p.ort_family = OrtFamily::WopImage;
        } else {
            throw Error(ErrorCode::ParseError, "unknown ORT family " + family);
        }
        p.full_range = j.at("full_range").get<bool>();
        if (!j.at("schedule_seed").is_null()) p.schedule_seed = j.at("schedule_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return p;
}

namespace {

nlohmann::json drawn_sample(const Stream<Drawn>& s, std::size_t sample) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < sample; ++i) {
        const auto& d = s.at(i);
        out.push_back({{"value", format(d.value)}, {"term", d.term}});
    }
    return out;
}

nlohmann::json certificate_json(const Certificate& cert, std::size_t sample) {
    return std::visit(
        [sample](const auto& c) -> nlohmann::json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, EctCert>) {
                return {{"kind", "ect"}, {"stabilization_index", c.stabilization_index}, {"tail_palette", c.tail_palette}};
            } else if constexpr (std::is_same_v<T, TcnCert>) {
                return {{"kind", "tcn"}, {"withheld", c.withheld}};
            } else if constexpr (std::is_same_v<T, WopCert>) {
                return {{"kind", "wop"}, {"planted_position", c.planted_position}, {"witness", drawn_sample(c.witness, sample)}};
            } else {
                nlohmann::json j{{"kind", "ort"}, {"true_color", c.true_color}, {"homogeneous", c.homogeneous.take(sample)}};
                if (c.schedule) {
                    j["schedule"] = {{"threshold", c.schedule->threshold},
                                     {"period", c.schedule->period},
                                     {"max_prefix_step", c.schedule->max_prefix_step},
                                     {"max_period_step", c.schedule->max_period_step},
                                     {"planted_residue", c.schedule->planted_residue}};
                }
                return j;
            }
        },
        cert);
}

nlohmann::json instance_sample(const Instance& inst, std::size_t sample) {
    return std::visit(
        [sample](const auto& x) -> nlohmann::json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnaryColorStream>) {
                return {{"n_colors", x.n_colors}, {"values", x.values.take(sample)}};
            } else if constexpr (std::is_same_v<T, std::vector<EnumerationStream>>) {
                auto rows = nlohmann::json::array();
                for (const auto& e : x) rows.push_back(e.values.take(sample));
                return {{"enumerations", rows}};
            } else if constexpr (std::is_same_v<T, OmegaSequence>) {
                auto terms = nlohmann::json::array();
                for (std::size_t i = 0; i < sample; ++i) terms.push_back(format(x.terms.at(i)));
                return {{"order", x.order->name()}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, LexSequence>) {
                auto rows = nlohmann::json::array();
                for (std::size_t i = 0; i < sample; ++i) rows.push_back(format(x.rows.at(i)));
                return {{"order", x.order->name()}, {"width", x.width}, {"rows", rows}};
            } else {
                std::vector<int> table;
                for (bool b : x.poset.table()) table.push_back(b ? 1 : 0);
                auto colors = nlohmann::json::array();
                for (std::size_t i = 0; i + 1 < sample; ++i) {
                    for (std::size_t j = i + 1; j < sample; ++j) colors.push_back(x.coloring(i, j));
                }
                return {{"poset_size", x.poset.size()}, {"leq", table}, {"colors", colors}};
            }
        },
        inst);
}

}  // namespace

nlohmann::json to_fixture(const CertifiedInstance& ci, std::size_t sample) {
    if (sample < 2) throw Error(ErrorCode::ParamsOutOfRange, "fixture sample must be at least 2");
    return {{"tag", std::string(to_string(ci.tag))},
            {"seed", ci.seed},
            {"params", params_to_json(ci.params)},
            {"sample", sample},
            {"certificate", certificate_json(ci.certificate, sample)},
            {"prefix_sample", instance_sample(ci.instance, sample)}};
}

CertifiedInstance from_fixture(const nlohmann::json& fixture) {
    ProblemTag tag;
    std::uint64_t seed = 0;
    GenParams params;
    std::size_t sample = 0;
    try {
        tag = parse_problem_tag(fixture.at("tag").get<std::string>());
        seed = fixture.at("seed").get<std::uint64_t>();
        params = params_from_json(fixture.at("params"));
        sample = fixture.at("sample").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    CertifiedInstance ci = gen_certified_instance(tag, seed, params);
    if (to_fixture(ci, sample) != fixture) {
        throw Error(ErrorCode::CertificateMismatch, "regenerated instance differs from the stored fixture");
    }
    return ci;
}

}  // namespace wopbench
