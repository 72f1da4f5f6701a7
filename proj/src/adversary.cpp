#include "wopbench/adversary.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "wopbench/error.hpp"
#include "wopbench/problems.hpp"
#include "wopbench/reductions.hpp"

namespace wopbench {

std::string_view to_string(Actor a) {
    switch (a) {
        case Actor::H: return "H";
        case Actor::K: return "K";
        case Actor::Adv: return "ADV";
    }
    return "?";
}

std::string_view to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::RefutationFound: return "RefutationFound";
        case VerdictKind::BudgetExhausted: return "BudgetExhausted";
        case VerdictKind::CandidateIllFormed: return "CandidateIllFormed";
    }
    return "?";
}

std::string_view to_string(AdversaryKind a) {
    switch (a) {
        case AdversaryKind::WopEct: return "wop-ect";
        case AdversaryKind::LexLpo: return "lex-lpo";
        case AdversaryKind::IsFiniteWop: return "isfinite-wop";
    }
    return "?";
}

AdversaryKind parse_adversary(std::string_view text) {
    for (auto a : {AdversaryKind::WopEct, AdversaryKind::LexLpo, AdversaryKind::IsFiniteWop}) {
        if (to_string(a) == text) return a;
    }
    throw Error(ErrorCode::UnknownCandidate, "no adversary named '" + std::string(text) + "'");
}

namespace {

struct OutOfFuel {};
struct IllFormed {
    std::string why;
};
struct Found {
    std::string reason;
    Refutation refutation;
};

bool tape_prefix(const Tape& a, const Tape& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool tapes_prefix(const Tapes& a, const Tapes& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!tape_prefix(a[i], b[i])) return false;
    }
    return true;
}

nlohmann::json tape_json(const Tape& t, std::size_t from = 0) {
    auto out = nlohmann::json::array();
    for (std::size_t i = from; i < t.size(); ++i) out.push_back(format(t[i]));
    return out;
}

/// Shared state of one duel: fuel, per-actor call history for the
/// monotonicity monitor, and the event log.
class Duel {
public:
    explicit Duel(std::uint64_t fuel) : fuel_(fuel) {}

    void require(std::uint64_t symbols) const {
        if (symbols + 1 > fuel_) throw OutOfFuel{};
    }

    Tape call(Actor actor, const ContinuousFunctional& f, const Tapes& input) {
        std::uint64_t cost = 1;
        for (const auto& t : input) cost += t.size();
        if (cost > fuel_) {
            used_ += fuel_;
            fuel_ = 0;
            throw OutOfFuel{};
        }
        fuel_ -= cost;
        used_ += cost;
        Tape out = f(input);

        auto& hist = history_[actor];
        for (const auto& [pin, pout] : hist) {
            if (tapes_prefix(pin, input) && !tape_prefix(pout, out)) {
                log(actor, input, out, &hist.back());
                throw IllFormed{f.name() + " retracted output on an extended input"};
            }
            if (tapes_prefix(input, pin) && !tape_prefix(out, pout)) {
                log(actor, input, out, &hist.back());
                throw IllFormed{f.name() + " produced more on a shorter input than on its extension"};
            }
        }
        log(actor, input, out, hist.empty() ? nullptr : &hist.back());
        hist.emplace_back(input, out);
        if (hist.size() > 16) hist.pop_front();
        return out;
    }

    void note(const std::string& text) {
        transcript_.push_back({{"step", transcript_.size()},
                               {"actor", to_string(Actor::Adv)},
                               {"input_delta", nlohmann::json::array()},
                               {"output_delta", nlohmann::json::array({text})},
                               {"fuel_remaining", fuel_}});
    }

    std::uint64_t used() const { return used_; }
    std::vector<nlohmann::json> take_transcript() { return std::move(transcript_); }

private:
    void log(Actor actor, const Tapes& input, const Tape& out, const std::pair<Tapes, Tape>* prev) {
        // Deltas are relative to the actor's previous call; a reset logs every tape whole.
        const bool reset = prev == nullptr || !tapes_prefix(prev->first, input);
        auto in_delta = nlohmann::json::array();
        for (std::size_t i = 0; i < input.size(); ++i) {
            in_delta.push_back(tape_json(input[i], reset ? 0 : prev->first[i].size()));
        }
        const bool out_ext = prev != nullptr && tape_prefix(prev->second, out);
        nlohmann::json ev{{"step", transcript_.size()},
                          {"actor", to_string(actor)},
                          {"input_delta", std::move(in_delta)},
                          {"output_delta", tape_json(out, out_ext ? prev->second.size() : 0)},
                          {"fuel_remaining", fuel_}};
        if (reset) ev["reset"] = true;
        transcript_.push_back(std::move(ev));
    }

    std::uint64_t fuel_;
    std::uint64_t used_ = 0;
    std::map<Actor, std::deque<std::pair<Tapes, Tape>>> history_;
    std::vector<nlohmann::json> transcript_;
};

template <typename Body>
Verdict run_guarded(std::uint64_t fuel, Body body) {
    Duel duel(fuel);
    Verdict v;
    try {
        body(duel);
        v.kind = VerdictKind::BudgetExhausted;
        v.reason = "adversary stopped without a decision";
    } catch (const Found& f) {
        v.kind = VerdictKind::RefutationFound;
        v.reason = f.reason;
        v.refutation = f.refutation;
        duel.note("refutation: " + f.reason);
    } catch (const OutOfFuel&) {
        v.kind = VerdictKind::BudgetExhausted;
        v.reason = "fuel exhausted";
    } catch (const IllFormed& e) {
        v.kind = VerdictKind::CandidateIllFormed;
        v.reason = e.why;
        duel.note("ill-formed: " + e.why);
    }
    v.fuel_used = duel.used();
    v.transcript = duel.take_transcript();
    return v;
}

OrderRef wop_ect_order() {
    static const OrderRef x = make_order(LinearOrder::lex_product({LinearOrder::finite_chain(2), LinearOrder::rationals()}));
    return x;
}

OrderRef rationals_order() {
    static const OrderRef q = make_order(LinearOrder::rationals());
    return q;
}

Element x_elem(int bit, const Rational& q) { return Element::tuple({Element::integer(bit), Element::rational(q)}); }

std::vector<Drawn> decode_output(const OrderRef& x, const Tape& out, const std::string& who) {
    std::vector<Drawn> d;
    d.reserve(out.size());
    for (const auto& e : out) {
        Drawn v;
        try {
            v = decode_drawn(e);
        } catch (const Error&) {
            throw IllFormed{who + " emitted a malformed solution symbol " + format(e)};
        }
        if (!x->contains(v.value)) throw IllFormed{who + " emitted " + format(v.value) + " outside " + x->name()};
        d.push_back(std::move(v));
    }
    return d;
}

std::int64_t natural_symbol(const Element& e, const std::string& who) {
    if (!e.is_integer() || e.as_integer() < 0) throw IllFormed{who + " emitted a non-natural symbol " + format(e)};
    return e.as_integer();
}

/// Rightmost x in the first half of the window whose color does not recur
/// later in the window; 0 when every early color recurs.
std::uint64_t guess_bound(const Tape& colors) {
    const std::size_t m = colors.size();
    std::map<std::int64_t, std::size_t> last;
    for (std::size_t x = 0; x < m; ++x) last[colors[x].as_integer()] = x;
    std::uint64_t b = 0;
    for (std::size_t x = 0; 2 * x < m; ++x) {
        if (last[colors[x].as_integer()] == x) b = x;
    }
    return b;
}

}  // namespace

// ---- encodings -------------------------------------------------------------

Element encode_drawn(const Drawn& d) {
    return Element::tuple({d.value, Element::integer(static_cast<std::int64_t>(d.term))});
}

Drawn decode_drawn(const Element& e) {
    if (!e.is_tuple() || e.as_tuple().size() != 2 || !e.as_tuple()[1].is_integer() || e.as_tuple()[1].as_integer() < 0) {
        throw Error(ErrorCode::ParseError, "not a (value, term) symbol: " + format(e));
    }
    return Drawn{e.as_tuple()[0], static_cast<std::size_t>(e.as_tuple()[1].as_integer())};
}

Element encode_term(const OmegaTerm& t) {
    Element::Tuple parts;
    for (const auto& p : t.pairs()) {
        parts.push_back(Element::tuple({Element::integer(static_cast<std::int64_t>(p.exponent)), p.coefficient}));
    }
    return Element::tuple(std::move(parts));
}

OmegaTerm decode_term(const OrderRef& x, const Element& e) {
    if (!e.is_tuple()) throw Error(ErrorCode::InvalidTerm, "not a term symbol: " + format(e));
    std::vector<OmegaPair> pairs;
    for (const auto& p : e.as_tuple()) {
        if (!p.is_tuple() || p.as_tuple().size() != 2 || !p.as_tuple()[0].is_integer() || p.as_tuple()[0].as_integer() < 0) {
            throw Error(ErrorCode::InvalidTerm, "not an (exponent, coefficient) pair: " + format(p));
        }
        pairs.push_back({static_cast<std::uint64_t>(p.as_tuple()[0].as_integer()), p.as_tuple()[1]});
    }
    return OmegaTerm(x, std::move(pairs));
}

// ---- staged families -------------------------------------------------------

OrderRef StagedFamily::order() const { return kind == AdversaryKind::WopEct ? wop_ect_order() : rationals_order(); }

Element StagedFamily::row(std::size_t i) const {
    std::size_t l = stage;
    for (std::size_t s = 0; s < std::min(stage, switches.size()); ++s) {
        if (i <= switches[s]) {
            l = s;
            break;
        }
    }
    const std::size_t offset = l == 0 ? i + 1 : i - switches[l - 1];
    const Rational tail = Rational(static_cast<long>(l)) + Rational(1, offset);
    if (kind == AdversaryKind::WopEct) {
        const Rational top = l == 0 ? Rational(1) : Rational(1, l + 1);
        return Element::tuple({x_elem(1, top), x_elem(0, l == 0 ? Rational(1, offset) : tail)});
    }
    return Element::tuple({Element::rational(Rational(-static_cast<long>(l))), Element::rational(tail)});
}

Tape StagedFamily::rows(std::size_t count) const {
    Tape t;
    t.reserve(count);
    for (std::size_t i = 0; i < count; ++i) t.push_back(row(i));
    return t;
}

Element StagedFamily::limit() const {
    const Rational s(static_cast<long>(stage));
    return kind == AdversaryKind::WopEct ? x_elem(0, s) : Element::rational(s);
}

nlohmann::json StagedFamily::to_json() const {
    return {{"kind", to_string(kind)}, {"switches", switches}, {"stage", stage}};
}

StagedFamily StagedFamily::from_json(const nlohmann::json& j) {
    StagedFamily f;
    f.kind = parse_adversary(j.at("kind").get<std::string>());
    f.switches = j.at("switches").get<std::vector<std::size_t>>();
    f.stage = j.at("stage").get<std::size_t>();
    return f;
}

bool extendable_in(const StagedFamily& family, const std::vector<Drawn>& prefix, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    if (prefix.empty()) return true;
    const auto x = family.order();
    const StagedFamily f = family;
    LexSequence seq{x, 2, Stream<LexTuple>([f](std::size_t i) { return LexTuple(f.row(i).as_tuple()); })};
    const auto rep = validate_wop_solution(seq, prefix);
    if (!rep.ok) return fail(rep.detail);
    if (!x->less(family.limit(), prefix.back().value)) {
        return fail("last element " + format(prefix.back().value) + " is not above the limit " + format(family.limit()) +
                    " of stage " + std::to_string(family.stage));
    }
    return true;
}

// ---- desk WOP solver -------------------------------------------------------

std::vector<Drawn> desk_wop_solution(const std::vector<OmegaTerm>& terms) {
    const std::size_t r = terms.size();
    if (r < 4) return {};
    std::size_t c = first_difference_color(terms[r / 2], terms[r - 1]);
    if (c % 2 == 0) c = first_difference_color(terms[r - 2], terms[r - 1]);
    if (c % 2 == 0) return {};
    const auto& x = *terms.front().base();
    // Pairwise colors of a descending sequence are transitive on a fixed odd
    // component, so comparing against the last chosen index is enough.
    for (std::size_t s = 0; s < r / 2; ++s) {
        if (!std::holds_alternative<Element>(terms[s].component(c))) continue;
        std::vector<std::size_t> chain{s};
        for (std::size_t t = s + 1; t < r; ++t) {
            if (first_difference_color(terms[chain.back()], terms[t]) == c) chain.push_back(t);
        }
        if (chain.size() < 2 || 4 * chain.back() < 3 * r) continue;
        std::vector<Drawn> out;
        bool ok = true;
        for (auto h : chain) {
            Element v = std::get<Element>(terms[h].component(c));
            if (!out.empty() && !x.less(v, out.back().value)) {
                ok = false;
                break;
            }
            out.push_back({std::move(v), h});
        }
        if (ok) return out;
    }
    return {};
}

namespace {

// ---- wop-ect ---------------------------------------------------------------

struct HWindow {
    std::uint64_t guess = 0;
    std::size_t rows = 0;
};

HWindow observe_bound(Duel& duel, const ContinuousFunctional& h, const StagedFamily& fam, std::size_t min_rows) {
    for (std::size_t w = std::max<std::size_t>(16, min_rows);; w *= 2) {
        duel.require(3 * w);
        const Tape a = duel.call(Actor::H, h, {fam.rows(w)});
        const Tape b = duel.call(Actor::H, h, {fam.rows(2 * w)});
        for (const auto& e : b) natural_symbol(e, "H");
        if (a.size() < 4) continue;
        const auto ga = guess_bound(a);
        if (ga == guess_bound(b)) return {ga, 2 * w};
    }
}

Refutation wop_ect_refutation(const StagedFamily& fam, std::uint64_t bound, const Tapes& input, const Tape& out,
                              const HWindow& hw) {
    return {"K's committed prefix does not extend to a solution of the instance",
            input,
            out,
            {{"family", fam.to_json()}, {"bound", bound}, {"bound_guess", hw.guess}, {"h_window_rows", hw.rows}}};
}

}  // namespace

Verdict adversary_wop_ect(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel) {
    return run_guarded(fuel, [&](Duel& duel) {
        const auto x = wop_ect_order();
        StagedFamily fam{AdversaryKind::WopEct, {}, 0};
        std::uint64_t prev_bound = 0;
        Tapes prev_input;
        Tape prev_out;
        for (std::size_t j = 0;; ++j) {
            fam.stage = j;
            const std::size_t start = j == 0 ? 0 : fam.switches.back() + 1;
            const HWindow hw = observe_bound(duel, h, fam, 2 * start + 2);
            duel.note("stage " + std::to_string(j) + ": bound guess " + std::to_string(hw.guess));
            if (j > 0 && hw.guess <= prev_bound) {
                // prev_bound already bounds H(tau^j), and K read only rows tau^j shares.
                throw Found{"stage " + std::to_string(j) + " reuses bound " + std::to_string(prev_bound),
                            wop_ect_refutation(fam, prev_bound, prev_input, prev_out, hw)};
            }
            const std::uint64_t b = j == 0 ? hw.guess : std::max(hw.guess, prev_bound + 1);
            for (std::size_t i = start;; ++i) {
                duel.require(i + 2);
                Tapes in{{Element::integer(static_cast<std::int64_t>(b))}, fam.rows(i + 1)};
                Tape out = duel.call(Actor::K, k, in);
                const auto drawn = decode_output(x, out, "K");
                const bool low = std::any_of(drawn.begin(), drawn.end(),
                                             [](const Drawn& d) { return d.value.as_tuple()[0].as_integer() == 0; });
                if (!low) continue;
                std::string why;
                if (!extendable_in(fam, drawn, &why)) {
                    throw Found{"K fails on stage " + std::to_string(j) + ": " + why,
                                wop_ect_refutation(fam, b, in, out, hw)};
                }
                fam.switches.push_back(i);
                prev_bound = b;
                prev_input = std::move(in);
                prev_out = std::move(out);
                duel.note("stage " + std::to_string(j) + ": K committed by row " + std::to_string(i));
                break;
            }
        }
    });
}

// ---- lex-lpo ---------------------------------------------------------------

namespace {

using Eta = std::vector<int>;

/// "rho_k has infinitely many ones", read as "a one in the second half of the
/// observed cells". Empty optional when the window is too short.
std::optional<Eta> eta_of(const Tape& out, std::size_t n) {
    if (n == 0) return Eta{};
    const std::size_t cells = out.size() - 1;
    const std::size_t t_max = cells / n;
    if (t_max < 4) return std::nullopt;
    Eta eta(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t t = t_max / 2; t < t_max; ++t) {
            if (out[1 + t * n + k].as_integer() == 1) eta[k] = 1;
        }
    }
    return eta;
}

void check_lpo_output(const Tape& out) {
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!out[i].is_integer() || (out[i].as_integer() != 0 && out[i].as_integer() != 1)) {
            throw IllFormed{"H emitted a non-bit cell " + format(out[i])};
        }
    }
}

Eta observe_eta(Duel& duel, const ContinuousFunctional& h, const StagedFamily& fam, std::size_t n,
                std::size_t min_rows) {
    if (n == 0) return {};
    for (std::size_t w = std::max<std::size_t>(16, min_rows);; w *= 2) {
        duel.require(3 * w);
        const Tape a = duel.call(Actor::H, h, {fam.rows(w)});
        const Tape b = duel.call(Actor::H, h, {fam.rows(2 * w)});
        check_lpo_output(b);
        const auto ea = eta_of(a, n);
        const auto eb = eta_of(b, n);
        if (ea && eb && *ea == *eb) return *ea;
    }
}

Tape eta_tape(const Eta& eta) {
    Tape t;
    for (int v : eta) t.push_back(Element::integer(v));
    return t;
}

std::string eta_text(const Eta& eta) {
    std::string s;
    for (int v : eta) s += static_cast<char>('0' + v);
    return s.empty() ? "()" : s;
}

}  // namespace

Verdict adversary_lex_lpo(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel,
                          std::size_t max_queries) {
    return run_guarded(fuel, [&](Duel& duel) {
        const auto q = rationals_order();
        StagedFamily fam{AdversaryKind::LexLpo, {}, 0};

        // Least number of tau^0 rows after which H has committed to n.
        std::size_t hi = 1;
        Tape first;
        for (;; hi *= 2) {
            duel.require(hi);
            first = duel.call(Actor::H, h, {fam.rows(hi)});
            if (!first.empty()) break;
        }
        std::size_t lo = hi / 2;  // empty output at lo rows (or lo == 0)
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (duel.call(Actor::H, h, {fam.rows(mid)}).empty()) lo = mid;
            else hi = mid;
        }
        const std::size_t i_bar = hi - 1;
        const auto n = static_cast<std::size_t>(natural_symbol(first[0], "H"));
        if (n > max_queries) {
            throw Error(ErrorCode::ExponentOverflow,
                        "H asks " + std::to_string(n) + " questions; at most " + std::to_string(max_queries) + " supported");
        }
        const std::size_t stages = std::size_t{1} << n;
        duel.note("H committed to n = " + std::to_string(n) + " after " + std::to_string(hi) + " rows");

        std::vector<Eta> etas;
        std::vector<Tapes> inputs;
        std::vector<Tape> outs;
        auto pigeonhole = [&](const Eta& eta, const std::string& where) {
            for (std::size_t jp = 0; jp < etas.size(); ++jp) {
                if (etas[jp] != eta) continue;
                throw Found{where + " repeats the answer " + eta_text(eta) + " of stage " + std::to_string(jp),
                            Refutation{"K's committed prefix does not extend to a solution of the instance",
                                       inputs[jp],
                                       outs[jp],
                                       {{"family", fam.to_json()}, {"eta", eta}, {"matched_stage", jp}}}};
            }
        };

        for (std::size_t j = 0; j < stages; ++j) {
            fam.stage = j;
            const std::size_t start = j == 0 ? i_bar : fam.switches.back() + 1;
            const Eta eta = observe_eta(duel, h, fam, n, 2 * start + 2);
            duel.note("stage " + std::to_string(j) + ": answers " + eta_text(eta));
            pigeonhole(eta, "stage " + std::to_string(j));
            for (std::size_t i = start;; ++i) {
                duel.require(n + i + 1);
                Tapes in{eta_tape(eta), fam.rows(i + 1)};
                Tape out = duel.call(Actor::K, k, in);
                if (out.empty()) continue;
                const auto drawn = decode_output(q, out, "K");
                std::string why;
                if (!extendable_in(fam, drawn, &why)) {
                    throw Found{"K fails on stage " + std::to_string(j) + ": " + why,
                                Refutation{"K's committed prefix does not extend to a solution of the instance",
                                           in,
                                           out,
                                           {{"family", fam.to_json()}, {"eta", eta}}}};
                }
                fam.switches.push_back(i);
                etas.push_back(eta);
                inputs.push_back(std::move(in));
                outs.push_back(std::move(out));
                break;
            }
        }
        fam.stage = stages;
        const Eta eta = observe_eta(duel, h, fam, n, 2 * (fam.switches.back() + 1));
        duel.note("final instance: answers " + eta_text(eta));
        pigeonhole(eta, "the final instance");
        throw IllFormed{"answer " + eta_text(eta) + " is not an n-bit string"};
    });
}

// ---- isfinite-wop ----------------------------------------------------------

namespace {

Tape bits_tape(const std::vector<int>& bits) {
    Tape t;
    t.reserve(bits.size());
    for (int b : bits) t.push_back(Element::integer(b));
    return t;
}

std::vector<int> with_tail(std::vector<int> prefix, bool ten, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) prefix.push_back(ten ? static_cast<int>(1 - i % 2) : 0);
    return prefix;
}

std::vector<OmegaTerm> decode_instance(const Tape& out) {
    const auto q = rationals_order();
    std::vector<OmegaTerm> terms;
    terms.reserve(out.size());
    for (const auto& e : out) {
        try {
            terms.push_back(decode_term(q, e));
        } catch (const Error& err) {
            throw IllFormed{std::string("H emitted a malformed term: ") + err.what()};
        }
        if (terms.size() > 1 && cmp_omega_power(*q, terms[terms.size() - 2], terms.back()) != Ordering::Greater) {
            throw IllFormed{"H emitted a non-descending instance at term " + std::to_string(terms.size() - 1)};
        }
    }
    return terms;
}

Tape drawn_tape(const std::vector<Drawn>& d, std::size_t count) {
    Tape t;
    for (std::size_t i = 0; i < std::min(count, d.size()); ++i) t.push_back(encode_drawn(d[i]));
    return t;
}

std::optional<int> commitment(const Tape& out) {
    if (out.empty()) return std::nullopt;
    const auto v = out.front();
    if (!v.is_integer() || (v.as_integer() != 0 && v.as_integer() != 1)) throw IllFormed{"K emitted " + format(v)};
    return static_cast<int>(v.as_integer());
}

bool valid_prefix(const std::vector<OmegaTerm>& terms, const std::vector<Drawn>& d) {
    if (d.empty()) return true;
    const auto q = rationals_order();
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (!q->less(d[i].value, d[i - 1].value)) return false;
    }
    if (d.back().term >= terms.size()) return false;
    return is_contained(*q, d, terms);
}

Refutation isfinite_refutation(const Tapes& in, int committed, const std::vector<int>& prefix, bool ten,
                               const std::vector<int>& window, const std::vector<Drawn>& solution) {
    nlohmann::json sol = nlohmann::json::array();
    for (const auto& d : solution) sol.push_back({format(d.value), d.term});
    return {"K's committed answer differs from IsFinite of an instance its input extends to",
            in,
            {Element::integer(committed)},
            {{"prefix", prefix}, {"continuation", ten ? "10" : "0"}, {"window", window}, {"solution", sol}}};
}

}  // namespace

Verdict adversary_isfinite_wop(const ContinuousFunctional& h, const ContinuousFunctional& k, std::uint64_t fuel) {
    return run_guarded(fuel, [&](Duel& duel) {
        const auto q = rationals_order();
        auto instance = [&](const std::vector<int>& bits) {
            duel.require(bits.size());
            return decode_instance(duel.call(Actor::H, h, {bits_tape(bits)}));
        };
        auto k_call = [&](const std::vector<Drawn>& x, std::size_t count, const std::vector<int>& bits) {
            duel.require(count + bits.size());
            return commitment(duel.call(Actor::K, k, {drawn_tape(x, count), bits_tape(bits)}));
        };

        std::vector<int> pi;
        for (std::size_t block = 0;; ++block) {
            // s-branch: pi followed by zeros forever.
            std::vector<Drawn> y;
            std::vector<int> window;
            std::size_t len = 16;
            for (;; len *= 2) {
                window = with_tail(pi, false, len);
                y = desk_wop_solution(instance(window));
                if (k_call(y, y.size(), window)) break;
            }
            std::size_t lo_n = 0, hi_n = len;  // least zero count with a commitment
            while (lo_n < hi_n) {
                const std::size_t mid = (lo_n + hi_n) / 2;
                if (k_call(y, y.size(), with_tail(pi, false, mid))) hi_n = mid;
                else lo_n = mid + 1;
            }
            std::size_t zeros = hi_n;
            std::size_t lo_m = 0, hi_m = y.size();
            while (lo_m < hi_m) {
                const std::size_t mid = (lo_m + hi_m) / 2;
                if (k_call(y, mid, with_tail(pi, false, zeros))) hi_m = mid;
                else lo_m = mid + 1;
            }
            const std::size_t m = hi_m;
            // All of y_0..y_{m-1} must already be mentioned by H on the bits K read.
            const std::size_t need = m == 0 ? 0 : y[m - 1].term + 1;
            while (instance(with_tail(pi, false, zeros)).size() < need) ++zeros;
            const std::vector<int> rho = with_tail(pi, false, zeros);
            const Tapes y_in{drawn_tape(y, m), bits_tape(rho)};
            const int y_answer = *commitment(duel.call(Actor::K, k, y_in));
            duel.note("block " + std::to_string(block) + ": K answers " + std::to_string(y_answer) + " after " +
                      std::to_string(zeros) + " zeros and " + std::to_string(m) + " solution elements");
            if (y_answer == 0) {
                throw Found{"K answers 'infinite' on a string with finitely many ones",
                            isfinite_refutation(y_in, 0, rho, false, window, y)};
            }

            // p-branch probe: rho followed by (10) forever.
            const std::vector<int> p_window = with_tail(rho, true, len);
            const auto p_terms = instance(p_window);
            const auto x_full = desk_wop_solution(p_terms);
            const std::size_t mentioned = instance(rho).size();
            std::size_t avail = 0;
            while (avail < x_full.size() && x_full[avail].term < mentioned) ++avail;
            if (const auto ans = k_call(x_full, avail, rho)) {
                if (*ans == 1) {
                    throw Found{"K answers 'finite' on a string with infinitely many ones",
                                isfinite_refutation({drawn_tape(x_full, avail), bits_tape(rho)}, 1, rho, true, p_window,
                                                    x_full)};
                }
                std::size_t lo = 0, hi = avail;
                while (lo < hi) {
                    const std::size_t mid = (lo + hi) / 2;
                    if (k_call(x_full, mid, rho)) hi = mid;
                    else lo = mid + 1;
                }
                const std::size_t c = hi;
                if (c > 0 && m > 0) {
                    const Drawn& xl = x_full[c - 1];
                    const Drawn& yl = y[m - 1];
                    if (!q->less(xl.value, yl.value)) {
                        std::vector<Drawn> z(x_full.begin(), x_full.begin() + static_cast<std::ptrdiff_t>(c));
                        z.insert(z.end(), y.begin() + static_cast<std::ptrdiff_t>(m), y.end());
                        if (valid_prefix(instance(window), z)) {
                            throw Found{"spliced solution: K answers 'infinite' on the zero branch",
                                        isfinite_refutation({drawn_tape(x_full, c), bits_tape(rho)}, 0, rho, false,
                                                            window, z)};
                        }
                    } else {
                        std::vector<Drawn> w(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(m));
                        w.insert(w.end(), x_full.begin() + static_cast<std::ptrdiff_t>(c), x_full.end());
                        if (valid_prefix(p_terms, w)) {
                            throw Found{"spliced solution: K answers 'finite' on the alternating branch",
                                        isfinite_refutation(y_in, 1, rho, true, p_window, w)};
                        }
                    }
                    duel.note("block " + std::to_string(block) + ": splice not contained; continuing");
                }
            }
            pi = rho;
            pi.push_back(1);
        }
    });
}

// ---- candidates ------------------------------------------------------------

namespace {

using Fn = ContinuousFunctional::Fn;

const Element& entry(const Element& row, std::size_t idx) { return row.as_tuple()[idx]; }

/// Greedy strictly descending run over one column of rows [from, end), appended to `out`.
void greedy_column(const OrderRef& x, const Tape& rows, std::size_t col, std::size_t from, std::size_t end, Tape& out,
                   std::optional<Element> below = std::nullopt) {
    for (std::size_t i = from; i < std::min(end, rows.size()); ++i) {
        const Element& v = entry(rows[i], col);
        if (below && !x->less(v, *below)) continue;
        out.push_back(encode_drawn({v, i}));
        below = v;
    }
}

std::optional<Element> last_value(const Tape& out) {
    if (out.empty()) return std::nullopt;
    return decode_drawn(out.back()).value;
}

Fn colors(std::function<std::int64_t(const Tape&, std::size_t)> c) {
    return [c](const Tapes& in) {
        Tape out;
        for (std::size_t x = 0; x < in[0].size(); ++x) out.push_back(Element::integer(c(in[0], x)));
        return out;
    };
}

std::vector<Candidate> wop_ect_candidates() {
    const auto x = wop_ect_order();
    auto greedy_low = [x](std::size_t from_offset, std::size_t wait) -> Fn {
        return [x, from_offset, wait](const Tapes& in) {
            const auto b = static_cast<std::size_t>(in[0][0].as_integer());
            Tape out;
            if (in[1].size() < b + wait) return out;
            greedy_column(x, in[1], 1, from_offset == 0 ? 0 : b, in[1].size(), out);
            return out;
        };
    };
    std::vector<Candidate> c;
    c.push_back({"const-column", AdversaryKind::WopEct, "H colors everything 0; K walks the low column from row 0",
                 {"H.const", colors([](const Tape&, std::size_t) { return 0; })},
                 {"K.low-column", greedy_low(0, 0)},
                 VerdictKind::RefutationFound});
    c.push_back({"lag-column", AdversaryKind::WopEct, "H settles after 5 fresh colors; K takes one high entry then the low column past b",
                 {"H.lag", colors([](const Tape&, std::size_t i) { return i < 5 ? static_cast<std::int64_t>(i) : 5 + static_cast<std::int64_t>(i % 2); })},
                 {"K.lag", [x](const Tapes& in) {
                      const auto b = static_cast<std::size_t>(in[0][0].as_integer());
                      Tape out{encode_drawn({entry(in[1][0], 0), 0})};
                      greedy_column(x, in[1], 1, b + 1, in[1].size(), out, last_value(out));
                      return out;
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"first-col-then-second", AdversaryKind::WopEct,
                 "H counts distinct high entries (capped at 3); K descends the high column up to b, then the low one",
                 {"H.distinct", colors([x](const Tape& rows, std::size_t i) {
                      std::vector<Element> seen;
                      for (std::size_t r = 0; r <= i; ++r) {
                          if (std::find(seen.begin(), seen.end(), entry(rows[r], 0)) == seen.end()) seen.push_back(entry(rows[r], 0));
                      }
                      return static_cast<std::int64_t>(std::min<std::size_t>(seen.size(), 3));
                  })},
                 {"K.high-then-low", [x](const Tapes& in) {
                      const auto b = static_cast<std::size_t>(in[0][0].as_integer());
                      Tape out;
                      greedy_column(x, in[1], 0, 0, b + 1, out);
                      if (in[1].size() > b + 1) greedy_column(x, in[1], 1, b + 1, in[1].size(), out, last_value(out));
                      return out;
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"sticky-second", AdversaryKind::WopEct, "H colors min(x, 3); K waits b + 3 rows, then walks the low column from row b",
                 {"H.min3", colors([](const Tape&, std::size_t i) { return static_cast<std::int64_t>(std::min<std::size_t>(i, 3)); })},
                 {"K.sticky", greedy_low(1, 3)},
                 VerdictKind::RefutationFound});
    c.push_back({"column-one-only", AdversaryKind::WopEct, "K never leaves the high column, so it never commits on tau^0",
                 {"H.const", colors([](const Tape&, std::size_t) { return 0; })},
                 {"K.high-only", [x](const Tapes& in) {
                      Tape out;
                      greedy_column(x, in[1], 0, 0, in[1].size(), out);
                      return out;
                  }},
                 VerdictKind::BudgetExhausted});
    c.push_back({"retract-h", AdversaryKind::WopEct, "H recolors every row when its input doubles",
                 {"H.retract", colors([](const Tape& rows, std::size_t i) { return static_cast<std::int64_t>((rows.size() / 16 + i) % 2); })},
                 {"K.low-column", greedy_low(0, 0)},
                 VerdictKind::CandidateIllFormed});
    return c;
}

std::vector<Candidate> lex_lpo_candidates() {
    const auto q = rationals_order();
    auto lpo_h = [](std::int64_t n, std::function<int(const Element&)> cell) -> Fn {
        return [n, cell](const Tapes& in) {
            Tape out;
            if (in[0].empty()) return out;
            out.push_back(Element::integer(n));
            for (const auto& row : in[0]) {
                for (std::int64_t k = 0; k < n; ++k) out.push_back(Element::integer(cell(row)));
            }
            return out;
        };
    };
    auto greedy_all = [q](const Tapes& in) {
        Tape out;
        greedy_column(q, in[1], 1, 0, in[1].size(), out);
        return out;
    };
    auto neg_int = [](const Element& row) -> std::optional<long> {
        const Rational& a = entry(row, 0).as_rational();
        if (a >= 0) return std::nullopt;
        return -a.get_num().get_si();
    };
    std::vector<Candidate> c;
    c.push_back({"replay", AdversaryKind::LexLpo, "one question that always answers 0; K replays the low column",
                 {"H.zero-question", lpo_h(1, [](const Element&) { return 0; })},
                 {"K.replay", greedy_all},
                 VerdictKind::RefutationFound});
    c.push_back({"zero-queries", AdversaryKind::LexLpo, "H asks nothing; K replays the low column",
                 {"H.none", lpo_h(0, [](const Element&) { return 0; })},
                 {"K.replay", greedy_all},
                 VerdictKind::RefutationFound});
    c.push_back({"parity", AdversaryKind::LexLpo,
                 "H asks whether odd negative heads recur; K follows the latest head when told yes",
                 {"H.odd-heads", lpo_h(1, [neg_int](const Element& row) {
                      const auto v = neg_int(row);
                      return v && *v % 2 == 1 ? 1 : 0;
                  })},
                 {"K.follow-head", [q, neg_int](const Tapes& in) {
                      Tape out;
                      const bool yes = in[0].front().as_integer() == 1;
                      std::optional<Element> head;
                      std::optional<Element> below;
                      for (std::size_t i = 0; i < in[1].size(); ++i) {
                          const Element& a = entry(in[1][i], 0);
                          if (!head) {
                              if (yes && !neg_int(in[1][i])) continue;
                              head = a;
                          }
                          if (!(a == *head)) continue;
                          const Element& v = entry(in[1][i], 1);
                          if (below && !q->less(v, *below)) continue;
                          out.push_back(encode_drawn({v, i}));
                          below = v;
                      }
                      return out;
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"eager-k", AdversaryKind::LexLpo, "H asks whether negative heads recur; K ignores the answer",
                 {"H.neg-heads", lpo_h(1, [neg_int](const Element& row) { return neg_int(row) ? 1 : 0; })},
                 {"K.replay", greedy_all},
                 VerdictKind::RefutationFound});
    c.push_back({"silent-h", AdversaryKind::LexLpo, "H never commits to a number of questions",
                 {"H.silent", [](const Tapes&) { return Tape{}; }},
                 {"K.replay", greedy_all},
                 VerdictKind::BudgetExhausted});
    c.push_back({"flip-n", AdversaryKind::LexLpo, "H's first symbol alternates with input parity",
                 {"H.flip", [](const Tapes& in) {
                      Tape out;
                      if (!in[0].empty()) out.push_back(Element::integer(static_cast<std::int64_t>(in[0].size() % 2)));
                      return out;
                  }},
                 {"K.replay", greedy_all},
                 VerdictKind::CandidateIllFormed});
    return c;
}

std::vector<Candidate> isfinite_candidates() {
    const auto q = rationals_order();
    Fn h_const = [q](const Tapes& in) {
        Tape out;
        for (std::size_t t = 0; t < in[0].size(); ++t) out.push_back(encode_term(OmegaTerm(q, {{1, Element::rational(Rational(1, t + 1))}})));
        return out;
    };
    Fn h_split = [q](const Tapes& in) {
        Tape out;
        long ones = 0;
        long last = -1;
        for (std::size_t t = 0; t < in[0].size(); ++t) {
            if (in[0][t].as_integer() == 1) {
                ++ones;
                last = static_cast<long>(t);
            }
            const auto gap = static_cast<unsigned long>(static_cast<long>(t) - last + 1);
            out.push_back(encode_term(OmegaTerm(q, {{2, Element::rational(Rational(-ones))}, {1, Element::rational(Rational(1, gap))}})));
        }
        return out;
    };
    auto ones_in = [](const Tape& bits, std::size_t n) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < std::min(n, bits.size()); ++i) c += bits[i].as_integer() == 1;
        return c;
    };
    std::vector<Candidate> c;
    c.push_back({"first-ten", AdversaryKind::IsFiniteWop, "K answers from the first ten bits alone",
                 {"H.const", h_const},
                 {"K.first-ten", [ones_in](const Tapes& in) {
                      if (in[1].size() < 10) return Tape{};
                      return Tape{Element::integer(ones_in(in[1], 10) == 0 ? 1 : 0)};
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"count-ones", AdversaryKind::IsFiniteWop, "K says infinite at the second one, finite after eight quiet bits",
                 {"H.split", h_split},
                 {"K.count", [ones_in](const Tapes& in) {
                      const std::size_t n = in[1].size();
                      if (ones_in(in[1], n) >= 2) return Tape{Element::integer(0)};
                      if (n >= 8 && ones_in(in[1], n) == ones_in(in[1], n - 8)) return Tape{Element::integer(1)};
                      return Tape{};
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"split", AdversaryKind::IsFiniteWop, "K says finite iff the first solution element is positive",
                 {"H.split", h_split},
                 {"K.sign", [](const Tapes& in) {
                      if (in[0].empty() || in[1].empty()) return Tape{};
                      return Tape{Element::integer(decode_drawn(in[0][0]).value.as_rational() > 0 ? 1 : 0)};
                  }},
                 VerdictKind::RefutationFound});
    c.push_back({"pessimist", AdversaryKind::IsFiniteWop, "K says infinite after four bits",
                 {"H.const", h_const},
                 {"K.pessimist", [](const Tapes& in) { return in[1].size() < 4 ? Tape{} : Tape{Element::integer(0)}; }},
                 VerdictKind::RefutationFound});
    c.push_back({"never-commit", AdversaryKind::IsFiniteWop, "K never answers",
                 {"H.const", h_const},
                 {"K.never", [](const Tapes&) { return Tape{}; }},
                 VerdictKind::BudgetExhausted});
    c.push_back({"retract-k", AdversaryKind::IsFiniteWop, "K's answer flips with the bit count",
                 {"H.const", h_const},
                 {"K.flip", [](const Tapes& in) {
                      return in[1].empty() ? Tape{} : Tape{Element::integer(static_cast<std::int64_t>(in[1].size() % 2))};
                  }},
                 VerdictKind::CandidateIllFormed});
    return c;
}

}  // namespace

const std::vector<Candidate>& candidate_catalog() {
    static const std::vector<Candidate> all = [] {
        std::vector<Candidate> c = wop_ect_candidates();
        for (auto& v : lex_lpo_candidates()) c.push_back(std::move(v));
        for (auto& v : isfinite_candidates()) c.push_back(std::move(v));
        return c;
    }();
    return all;
}

const Candidate& find_candidate(AdversaryKind which, std::string_view id) {
    for (const auto& c : candidate_catalog()) {
        if (c.which == which && c.id == id) return c;
    }
    throw Error(ErrorCode::UnknownCandidate,
                "no candidate '" + std::string(id) + "' for " + std::string(to_string(which)));
}

Verdict run_duel(const Candidate& c, std::uint64_t fuel) {
    switch (c.which) {
        case AdversaryKind::WopEct: return adversary_wop_ect(c.h, c.k, fuel);
        case AdversaryKind::LexLpo: return adversary_lex_lpo(c.h, c.k, fuel);
        case AdversaryKind::IsFiniteWop: return adversary_isfinite_wop(c.h, c.k, fuel);
    }
    throw Error(ErrorCode::UnknownCandidate, c.id);
}

// ---- refutation checking ---------------------------------------------------

bool check_refutation(const Candidate& c, const Refutation& r, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    Tape out;
    try {
        out = c.k(r.k_input);
    } catch (const std::exception& e) {
        return fail(std::string("K threw on the recorded input: ") + e.what());
    }
    if (out != r.committed) return fail("K no longer produces the recorded output");

    try {
        if (c.which == AdversaryKind::IsFiniteWop) {
            const auto& ev = r.evidence;
            const auto prefix = ev.at("prefix").get<std::vector<int>>();
            const bool ten = ev.at("continuation").get<std::string>() == "10";
            const auto window = ev.at("window").get<std::vector<int>>();
            if (window.size() < prefix.size() || window != with_tail(prefix, ten, window.size() - prefix.size())) {
                return fail("window does not follow the stated string");
            }
            const int truth = ten ? 0 : 1;
            if (r.committed.size() != 1 || r.committed[0].as_integer() == truth) {
                return fail("committed answer agrees with IsFinite");
            }
            const Tape& read_bits = r.k_input.at(1);
            if (!tape_prefix(read_bits, bits_tape(window))) return fail("K read bits outside the string");
            std::vector<Drawn> sol;
            for (const auto& s : ev.at("solution")) {
                sol.push_back({parse_element(*rationals_order(), s.at(0).get<std::string>()), s.at(1).get<std::size_t>()});
            }
            if (!tape_prefix(r.k_input.at(0), drawn_tape(sol, sol.size()))) {
                return fail("K's solution input is not a prefix of the exhibited solution");
            }
            const auto terms = decode_instance(c.h({bits_tape(window)}));
            if (!valid_prefix(terms, sol)) return fail("exhibited solution is not descending and contained in H's instance");
            return true;
        }
        const auto fam = StagedFamily::from_json(r.evidence.at("family"));
        const Tape& rows = r.k_input.at(1);
        if (rows != fam.rows(rows.size())) return fail("K's rows are not a prefix of the instance");
        const auto drawn = decode_output(fam.order(), r.committed, "K");
        std::string detail;
        if (extendable_in(fam, drawn, &detail)) return fail("committed prefix still extends to a solution");
        if (why) *why = detail;
        return true;
    } catch (const IllFormed& e) {
        return fail(e.why);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

}  // namespace wopbench
