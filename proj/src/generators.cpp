#include <algorithm>
#include <numeric>

#include "wopbench/error.hpp"
#include "wopbench/problems.hpp"
#include "wopbench/random.hpp"
#include "wopbench/reductions.hpp"

namespace wopbench {

namespace {

constexpr std::size_t kMaxGenWidth = 6;

Rational frac(std::int64_t num, std::int64_t den) {
    Rational q(static_cast<long>(num), static_cast<unsigned long>(den));
    q.canonicalize();
    return q;
}

// ---- ECT ---------------------------------------------------------------

CertifiedInstance gen_ect(std::uint64_t seed, const GenParams& params) {
    const std::size_t n = params.n;
    Rng rng(seed);
    const std::size_t s = static_cast<std::size_t>(rng.between(3, 40));
    std::vector<std::size_t> colors(n);
    std::iota(colors.begin(), colors.end(), 0);
    rng.shuffle(colors);
    const std::size_t palette_size = n == 1 ? 1 : static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(n) - 1));
    std::vector<std::size_t> palette(colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(palette_size));
    std::sort(palette.begin(), palette.end());

    std::vector<std::size_t> head(s + 1);
    for (auto& c : head) c = static_cast<std::size_t>(rng.below(n));
    // The color at the planted index never comes back, so s is the least bound.
    if (n > 1) head[s] = colors[palette_size + rng.below(n - palette_size)];

    auto tail_rng = std::make_shared<Rng>(rng.fork(1));
    auto block = std::make_shared<std::vector<std::size_t>>();
    auto values = Stream<std::size_t>::from_function([head, palette, tail_rng, block](std::size_t i) -> std::size_t {
        if (i < head.size()) return head[i];
        if (block->empty()) {
            *block = palette;
            tail_rng->shuffle(*block);
            std::reverse(block->begin(), block->end());
        }
        const std::size_t c = block->back();
        block->pop_back();
        return c;
    });
    return {ProblemTag::Ect, seed, params, UnaryColorStream{n, values}, EctCert{s, palette}};
}

// ---- TC_N --------------------------------------------------------------

Stream<std::uint64_t> enumeration_without(std::vector<std::uint64_t> withheld, Rng rng) {
    struct State {
        Rng rng;
        std::vector<std::uint64_t> withheld;
        std::vector<std::uint64_t> emitted;
        std::vector<std::uint64_t> pending;
        std::uint64_t next_block = 0;
    };
    auto st = std::make_shared<State>(State{rng, std::move(withheld), {}, {}, 0});
    return Stream<std::uint64_t>::from_function([st](std::size_t) -> std::uint64_t {
        if (!st->emitted.empty() && st->rng.chance(1, 4)) {
            return st->emitted[st->rng.below(st->emitted.size())];
        }
        while (st->pending.empty()) {
            for (std::uint64_t v = 4 * st->next_block; v < 4 * st->next_block + 4; ++v) {
                if (std::find(st->withheld.begin(), st->withheld.end(), v) == st->withheld.end()) st->pending.push_back(v);
            }
            ++st->next_block;
            st->rng.shuffle(st->pending);
        }
        const std::uint64_t v = st->pending.back();
        st->pending.pop_back();
        st->emitted.push_back(v);
        return v;
    });
}

CertifiedInstance gen_tcn(std::uint64_t seed, const GenParams& params) {
    Rng rng(seed);
    TcnCert cert;
    std::vector<EnumerationStream> streams;
    for (std::size_t m = 0; m < params.n; ++m) {
        std::vector<std::uint64_t> w;
        if (!params.full_range && !rng.chance(1, 3)) {
            const auto k = rng.between(1, 3);
            while (static_cast<std::int64_t>(w.size()) < k) {
                const std::uint64_t v = rng.below(12);
                if (std::find(w.begin(), w.end(), v) == w.end()) w.push_back(v);
            }
            std::sort(w.begin(), w.end());
        }
        streams.push_back(EnumerationStream{enumeration_without(w, rng.fork(100 + m))});
        cert.withheld.push_back(std::move(w));
    }
    return {ProblemTag::Tcn, seed, params, std::move(streams), std::move(cert)};
}

// ---- WOP ---------------------------------------------------------------

OrderRef order_for(const GenParams& params) {
    if (params.order == "Q") return make_order(LinearOrder::rationals());
    if (params.order == "Z*") return make_order(LinearOrder::reversed_integers());
    if (params.order == "composite") return make_order(LinearOrder::composite(std::max<std::size_t>(params.n, 1)));
    throw Error(ErrorCode::ParamsOutOfRange, "unsupported base order " + params.order);
}

Element random_element(const LinearOrder& x, Rng& rng) {
    switch (x.kind()) {
        case OrderKind::Rationals:
            return Element::rational(frac(rng.between(-9, 9), rng.between(1, 4)));
        case OrderKind::ReversedIntegers:
            return Element::integer(rng.between(-9, 9));
        case OrderKind::Composite: {
            const auto n = static_cast<std::int64_t>(x.parameter());
            return Element::tuple({Element::integer(rng.between(1, n)), Element::integer(rng.between(0, 3)),
                                   Element::rational(frac(rng.between(-9, 9), rng.between(1, 4))),
                                   Element::integer(rng.between(-n, -1))});
        }
        default:
            throw Error(ErrorCode::ParamsOutOfRange, "no sampler for " + x.name());
    }
}

/// Something strictly below `e` in x.
Element step_down(const LinearOrder& x, const Element& e, Rng& rng) {
    switch (x.kind()) {
        case OrderKind::Rationals:
            return Element::rational(e.as_rational() - frac(rng.between(1, 3), rng.between(1, 4)));
        case OrderKind::ReversedIntegers:
            return Element::integer(e.as_integer() + rng.between(1, 3));
        case OrderKind::Composite: {
            auto parts = e.as_tuple();
            parts[2] = Element::rational(parts[2].as_rational() -
                                         frac(rng.between(1, 3), rng.between(1, 4)));
            return Element::tuple(std::move(parts));
        }
        default:
            throw Error(ErrorCode::ParamsOutOfRange, "no sampler for " + x.name());
    }
}

/// Something strictly above `e` in x.
Element step_up(const LinearOrder& x, const Element& e, Rng& rng) {
    switch (x.kind()) {
        case OrderKind::Rationals:
            return Element::rational(e.as_rational() + frac(rng.between(1, 3), rng.between(1, 4)));
        case OrderKind::ReversedIntegers:
            return Element::integer(e.as_integer() - rng.between(1, 3));
        case OrderKind::Composite: {
            auto parts = e.as_tuple();
            parts[2] = Element::rational(parts[2].as_rational() +
                                         frac(rng.between(1, 3), rng.between(1, 4)));
            return Element::tuple(std::move(parts));
        }
        default:
            throw Error(ErrorCode::ParamsOutOfRange, "no sampler for " + x.name());
    }
}

std::vector<OmegaPair> random_tail(const LinearOrder& x, std::uint64_t below, std::size_t length, Rng& rng) {
    std::vector<std::uint64_t> exps(below);
    std::iota(exps.begin(), exps.end(), 0);
    rng.shuffle(exps);
    exps.resize(std::min<std::size_t>(length, exps.size()));
    std::sort(exps.rbegin(), exps.rend());
    std::vector<OmegaPair> out;
    for (auto b : exps) out.push_back({b, random_element(x, rng)});
    return out;
}

// Layout: `warm` prefix-shrinking terms head + (b_p, A) + fixed tail, then
// head + (b_p, v_i) + random tail with v strictly descending.
CertifiedInstance gen_wop_omega(std::uint64_t seed, const GenParams& params) {
    OrderRef order = order_for(params);
    Rng rng(seed);
    const std::size_t warm = static_cast<std::size_t>(rng.between(0, 3));
    const std::size_t head_len = static_cast<std::size_t>(rng.between(0, 2));
    const std::uint64_t slot_exp = static_cast<std::uint64_t>(rng.between(static_cast<std::int64_t>(warm) + 1, 4));
    std::vector<OmegaPair> head;
    std::uint64_t e = slot_exp;
    for (std::size_t h = 0; h < head_len; ++h) {
        e += static_cast<std::uint64_t>(rng.between(1, 2));
        head.insert(head.begin(), OmegaPair{e, random_element(*order, rng)});
    }
    const std::size_t p = head.size();
    const Element v0 = random_element(*order, rng);
    const Element above = step_up(*order, v0, rng);
    const auto warm_tail = random_tail(*order, slot_exp, warm == 0 ? 0 : warm - 1, rng);

    struct State {
        Rng rng;
        Element v;
    };
    auto st = std::make_shared<State>(State{rng.fork(7), v0});
    auto terms = Stream<OmegaTerm>::from_function(
        [order, head, warm, slot_exp, above, warm_tail, st](std::size_t i) -> OmegaTerm {
            std::vector<OmegaPair> pairs = head;
            if (i < warm) {
                pairs.push_back({slot_exp, above});
                const std::size_t keep = warm_tail.size() - std::min(warm_tail.size(), i);
                pairs.insert(pairs.end(), warm_tail.begin(), warm_tail.begin() + static_cast<std::ptrdiff_t>(keep));
                return OmegaTerm(order, std::move(pairs));
            }
            if (i > warm) st->v = step_down(*order, st->v, st->rng);
            pairs.push_back({slot_exp, st->v});
            const auto tail = random_tail(*order, slot_exp, static_cast<std::size_t>(st->rng.between(0, 3)), st->rng);
            pairs.insert(pairs.end(), tail.begin(), tail.end());
            return OmegaTerm(order, std::move(pairs));
        });
    OmegaSequence seq{order, terms};
    auto witness = Stream<Drawn>::from_function([terms, warm, p](std::size_t i) -> Drawn {
        return {terms.at(warm + i).pairs().at(p).coefficient, warm + i};
    });
    return {ProblemTag::WopOmega, seed, params, seq, WopCert{2 * p + 1, witness}};
}

// Columns above the planted column j are fixed after the warm-up, column j
// descends, columns below it are noise. Warm-up rows descend in column n.
CertifiedInstance gen_wop_lex(std::uint64_t seed, const GenParams& params) {
    const std::size_t n = params.n;
    OrderRef order = order_for(params);
    Rng rng(seed);
    const std::size_t warm = static_cast<std::size_t>(rng.between(0, 3));
    const std::size_t planted = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(n)));
    std::vector<Element> fixed(n);  // index j-1, used for columns > planted
    for (auto& f : fixed) f = random_element(*order, rng);
    const Element v0 = random_element(*order, rng);
    const Element& top_after = planted == n ? v0 : fixed[n - 1];
    std::vector<Element> warm_top;
    Element cur = top_after;
    for (std::size_t r = 0; r < warm; ++r) {
        cur = step_up(*order, cur, rng);
        warm_top.insert(warm_top.begin(), cur);
    }
    struct State {
        Rng rng;
        Element v;
    };
    auto st = std::make_shared<State>(State{rng.fork(11), v0});
    auto rows = Stream<LexTuple>::from_function(
        [order, n, warm, planted, fixed, warm_top, st](std::size_t i) -> LexTuple {
            std::vector<Element> entries(n);  // entries[n - j] = column j
            if (i < warm) {
                entries[0] = warm_top[i];
                for (std::size_t t = 1; t < n; ++t) entries[t] = random_element(*order, st->rng);
                return LexTuple(std::move(entries));
            }
            if (i > warm) st->v = step_down(*order, st->v, st->rng);
            for (std::size_t j = 1; j <= n; ++j) {
                Element& slot = entries[n - j];
                if (j > planted) {
                    slot = fixed[j - 1];
                } else if (j == planted) {
                    slot = st->v;
                } else {
                    slot = random_element(*order, st->rng);
                }
            }
            return LexTuple(std::move(entries));
        });
    LexSequence seq{order, n, rows};
    auto witness = Stream<Drawn>::from_function([rows, warm, planted](std::size_t i) -> Drawn {
        return {rows.at(warm + i).column(planted), warm + i};
    });
    return {ProblemTag::WopLex, seed, params, seq, WopCert{planted, witness}};
}

// ---- ORT ---------------------------------------------------------------

StaircaseSchedule draw_schedule(Rng& rng) {
    StaircaseSchedule s;
    s.period = static_cast<std::size_t>(rng.between(2, 5));
    s.threshold = s.period * static_cast<std::size_t>(rng.between(1, 5));
    s.max_prefix_step = 6;
    s.max_period_step = s.period;
    s.planted_residue = static_cast<std::size_t>(rng.below(s.period));
    return s;
}

FinitePoset random_poset(std::size_t n, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> less;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (rng.chance(1, 2)) less.emplace_back(a, b);
        }
    }
    // Relabel so that index order is not always a linear extension.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (auto& [a, b] : less) {
        a = perm[a];
        b = perm[b];
    }
    return FinitePoset::from_covers(n, less);
}

struct StairStep {
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::size_t d = 1;
};

StairStep random_step(const FinitePoset& p, std::size_t d_lo, std::size_t d_hi, Rng& rng) {
    StairStep s;
    s.lo = static_cast<std::size_t>(rng.below(p.size()));
    std::vector<std::size_t> up;
    for (std::size_t b = 0; b < p.size(); ++b) {
        if (p.leq(s.lo, b)) up.push_back(b);
    }
    s.hi = up[rng.below(up.size())];
    s.d = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(d_lo), static_cast<std::int64_t>(d_hi)));
    return s;
}

CertifiedInstance gen_ort_staircase(std::uint64_t seed, const GenParams& params) {
    Rng rng(seed);
    Rng sched_rng = params.schedule_seed ? Rng(*params.schedule_seed) : rng.fork(3);
    const StaircaseSchedule sched = draw_schedule(sched_rng);
    FinitePoset poset = random_poset(params.n, rng);
    std::vector<StairStep> prefix(sched.threshold), period(sched.period);
    for (auto& s : prefix) s = random_step(poset, 1, sched.max_prefix_step, rng);
    for (auto& s : period) s = random_step(poset, 2, sched.max_period_step, rng);
    auto fn = [prefix, period, sched](std::size_t x, std::size_t y) -> std::size_t {
        const StairStep& s = x < sched.threshold ? prefix[x] : period[(x - sched.threshold) % sched.period];
        return y < x + s.d ? s.lo : s.hi;
    };
    const std::size_t first = sched.threshold + sched.planted_residue;
    auto homogeneous = Stream<std::size_t>::from_function(
        [first, sched](std::size_t t) -> std::size_t { return first + t * sched.period; });
    OrtCert cert{period[sched.planted_residue].hi, homogeneous, sched};
    const std::size_t size = poset.size();
    return {ProblemTag::Ort, seed, params, OrtInstance{std::move(poset), ColoringStream(size, fn, false)}, cert};
}

CertifiedInstance gen_ort_image(std::uint64_t seed, const GenParams& params) {
    CertifiedInstance source = gen_wop_omega(seed, params);
    const auto& seq = std::get<OmegaSequence>(source.instance);
    const auto& wc = std::get<WopCert>(source.certificate);
    WopToOrtImage image = wop_to_ort_forward(seq);
    // The planted slot is the first place where two witness rows differ, so
    // its component index is the color of every pair among them.
    auto witness = wc.witness;
    auto homogeneous = Stream<std::size_t>::from_function([witness](std::size_t t) { return witness.at(t).term; });
    return {ProblemTag::Ort, seed, params, std::move(image.instance), OrtCert{wc.planted_position, homogeneous, std::nullopt}};
}

}  // namespace

CertifiedInstance gen_certified_instance(ProblemTag tag, std::uint64_t seed, const GenParams& params) {
    if (params.n == 0 || params.n > kMaxGenWidth) {
        throw Error(ErrorCode::ParamsOutOfRange, "n must lie in [1, " + std::to_string(kMaxGenWidth) + "]");
    }
    switch (tag) {
        case ProblemTag::Ect: return gen_ect(seed, params);
        case ProblemTag::Tcn: return gen_tcn(seed, params);
        case ProblemTag::WopOmega: return gen_wop_omega(seed, params);
        case ProblemTag::WopLex: return gen_wop_lex(seed, params);
        case ProblemTag::Ort:
            return params.ort_family == OrtFamily::Staircase ? gen_ort_staircase(seed, params) : gen_ort_image(seed, params);
    }
    throw Error(ErrorCode::UnknownTag, "unknown tag");
}

}  // namespace wopbench
