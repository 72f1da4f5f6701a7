#include "wopbench/reductions.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "wopbench/error.hpp"

namespace wopbench {

std::string_view to_string(ReductionId id) {
    switch (id) {
        case ReductionId::WopToOrt: return "wop-to-ort";
        case ReductionId::OrtProduct: return "ort-product";
        case ReductionId::OrtToEctWop: return "ort-to-ect-wop";
        case ReductionId::LexToOmega: return "lex-to-omega";
        case ReductionId::TcnToLex: return "tcn-to-lex";
        case ReductionId::OrtFullPipeline: return "ort-full-pipeline";
    }
    return "?";
}

std::vector<ReductionId> all_reductions() {
    return {ReductionId::WopToOrt,   ReductionId::OrtProduct, ReductionId::OrtToEctWop,
            ReductionId::LexToOmega, ReductionId::TcnToLex,   ReductionId::OrtFullPipeline};
}

ReductionId parse_reduction_id(std::string_view text) {
    for (auto id : all_reductions()) {
        if (to_string(id) == text) return id;
    }
    throw Error(ErrorCode::UnknownReduction, std::string(text));
}

// ---- WOP(X -> X^omega) to ORT ------------------------------------------

std::size_t first_difference_color(const OmegaTerm& s, const OmegaTerm& t) {
    if (t.is_proper_prefix_of(s)) return t.length();
    const std::size_t limit = std::max(s.length(), t.length());
    for (std::size_t k = 0; k < limit; ++k) {
        if (!(s.component(k) == t.component(k))) return k;
    }
    throw Error(ErrorCode::NotDescending, "equal terms " + format(s));
}

WopToOrtImage wop_to_ort_forward(const OmegaSequence& sigma) {
    const OmegaTerm& first = sigma.terms.at(0);
    if (first.empty()) throw Error(ErrorCode::NotDescending, "sigma_0 is the least term; nothing can descend from it");
    WopToOrtContext ctx{static_cast<std::size_t>(first.pairs().front().exponent)};
    const std::size_t size = ctx.poset_size();
    auto terms = sigma.terms;
    auto order = sigma.order;
    auto fn = [terms, order, size](std::size_t i, std::size_t j) -> std::size_t {
        const OmegaTerm& s = terms.at(i);
        const OmegaTerm& t = terms.at(j);
        for (const auto* term : {&s, &t}) {
            if (term->length() > size) {
                throw Error(ErrorCode::LengthOverflow, format(*term) + " is longer than " + std::to_string(size));
            }
        }
        if (cmp_omega_power(*order, t, s) != Ordering::Less) {
            throw Error(ErrorCode::NotDescending,
                        "sigma_" + std::to_string(j) + " is not below sigma_" + std::to_string(i));
        }
        return first_difference_color(s, t);
    };
    return {OrtInstance{FinitePoset::reversed_chain(size), ColoringStream(size, fn)}, ctx};
}

Stream<Drawn> wop_to_ort_backward(const OmegaSequence& sigma, const Stream<std::size_t>& homogeneous,
                                  BackwardMutation mutation) {
    auto terms = sigma.terms;
    auto h = homogeneous;
    auto color = [terms](std::size_t a, std::size_t b) { return first_difference_color(terms.at(a), terms.at(b)); };
    auto c_star = std::make_shared<std::size_t>(0);
    return Stream<Drawn>::from_function([terms, h, color, c_star, mutation](std::size_t i) -> Drawn {
        if (i == 0) {
            const std::size_t c = color(h.at(0), h.at(1));
            const bool even = mutation == BackwardMutation::ParityFlip ? c % 2 == 1 : c % 2 == 0;
            if (even) throw Error(ErrorCode::EvenColor, "c* = " + std::to_string(c));
            *c_star = c;
        } else {
            if (h.at(i) <= h.at(i - 1)) throw Error(ErrorCode::NotIncreasing, "homogeneous set not increasing");
            for (auto a : {h.at(0), h.at(i - 1)}) {
                const std::size_t c = color(a, h.at(i));
                if (c != *c_star) {
                    throw Error(ErrorCode::NotHomogeneous, "c(" + std::to_string(a) + "," + std::to_string(h.at(i)) +
                                                               ") = " + std::to_string(c) + " but c* = " +
                                                               std::to_string(*c_star));
                }
            }
        }
        const std::size_t row = h.at(i);
        const Component comp = terms.at(row).component(*c_star);
        if (const auto* e = std::get_if<Element>(&comp)) return {*e, row};
        if (const auto* b = std::get_if<std::uint64_t>(&comp)) return {Element::integer(static_cast<std::int64_t>(*b)), row};
        throw Error(ErrorCode::NotHomogeneous, "component " + std::to_string(*c_star) + " undefined on sigma_" +
                                                   std::to_string(row));
    });
}

// ---- ORT product ------------------------------------------------------

std::size_t encode_product_color(std::span<const std::size_t> sizes, std::span<const std::size_t> parts) {
    std::size_t code = 0;
    for (std::size_t t = 0; t < sizes.size(); ++t) code = code * sizes[t] + parts[t];
    return code;
}

std::vector<std::size_t> decode_product_color(std::span<const std::size_t> sizes, std::size_t color) {
    std::vector<std::size_t> parts(sizes.size());
    for (std::size_t t = sizes.size(); t-- > 0;) {
        parts[t] = color % sizes[t];
        color /= sizes[t];
    }
    return parts;
}

FinitePoset product_poset(std::span<const FinitePoset> parts) {
    if (parts.empty()) throw Error(ErrorCode::EmptyList, "product of no posets");
    std::vector<std::size_t> sizes;
    std::size_t total = 1;
    for (const auto& p : parts) {
        sizes.push_back(p.size());
        total *= p.size();
    }
    std::vector<bool> table(total * total);
    for (std::size_t a = 0; a < total; ++a) {
        const auto da = decode_product_color(sizes, a);
        for (std::size_t b = 0; b < total; ++b) {
            const auto db = decode_product_color(sizes, b);
            bool le = true;
            for (std::size_t t = 0; t < parts.size() && le; ++t) le = parts[t].leq(da[t], db[t]);
            table[a * total + b] = le;
        }
    }
    return FinitePoset(total, std::move(table));
}

OrtInstance ort_product_forward(const std::vector<OrtInstance>& parts) {
    if (parts.empty()) throw Error(ErrorCode::EmptyList, "product of no instances");
    std::vector<FinitePoset> posets;
    std::vector<std::size_t> sizes;
    for (const auto& p : parts) {
        posets.push_back(p.poset);
        sizes.push_back(p.poset.size());
    }
    FinitePoset poset = product_poset(posets);
    auto fn = [parts, sizes](std::size_t i, std::size_t j) {
        std::vector<std::size_t> colors;
        colors.reserve(parts.size());
        for (const auto& p : parts) colors.push_back(p.coloring(i, j));
        return encode_product_color(sizes, colors);
    };
    const std::size_t size = poset.size();
    return {std::move(poset), ColoringStream(size, fn, false)};
}

std::vector<Stream<std::size_t>> ort_product_backward(const Stream<std::size_t>& homogeneous, std::size_t n) {
    return std::vector<Stream<std::size_t>>(n, homogeneous);
}

// ---- ORT[n] to ECT^n x WOP(X -> X^n_lex) -------------------------------

namespace {

Element composite_entry(std::size_t j, std::int64_t second, const Rational& third, std::int64_t fourth) {
    return Element::tuple({Element::integer(static_cast<std::int64_t>(j)), Element::integer(second),
                           Element::rational(third), Element::integer(fourth)});
}

}  // namespace

OrtStageEngine::OrtStageEngine(OrtInstance instance)
    : instance_(std::move(instance)),
      n_(instance_.poset.size()),
      extension_(linear_extension(instance_.poset)),
      rank_(n_),
      order_(make_order(LinearOrder::composite(n_))) {
    for (std::size_t j = 1; j <= n_; ++j) rank_[extension_[j - 1]] = j;
    Stage s0;
    s0.improvement.assign(n_, true);
    s0.previous.assign(n_, 0);
    s0.previous_next.assign(n_, 0);
    s0.witness.assign(n_, std::nullopt);
    s0.m.assign(n_, 0);
    for (std::size_t j = 1; j <= n_; ++j) s0.entries.push_back(composite_entry(j, 1, Rational(2), -1));
    stages_.push_back(std::move(s0));
}

void OrtStageEngine::compute_next() const {
    const std::size_t i = stages_.size();
    const Stage& last = stages_.back();
    Stage s;
    s.previous = last.previous_next;
    s.improvement.assign(n_, false);
    s.witness.assign(n_, std::nullopt);
    s.previous_next = s.previous;
    s.m.assign(n_, 0);

    const std::size_t lo = *std::min_element(s.previous.begin(), s.previous.end());
    std::size_t pending = n_;
    for (std::size_t k = lo; k < i && pending > 0; ++k) {
        const std::size_t color = instance_.coloring(k, i);
        if (color >= n_) throw Error(ErrorCode::ColorOutOfRange, "color " + std::to_string(color));
        if (k + 1 < i) {
            const std::size_t before = instance_.coloring(k, i - 1);
            if (!instance_.poset.leq(before, color)) {
                throw Error(ErrorCode::NotRightOrdered, "c(" + std::to_string(k) + "," + std::to_string(i - 1) +
                                                            ") not <=_P c(" + std::to_string(k) + "," +
                                                            std::to_string(i) + ")");
            }
        }
        const std::size_t j = rank_[color];
        if (k >= s.previous[j - 1] && !s.witness[j - 1]) {
            s.witness[j - 1] = k;
            s.improvement[j - 1] = true;
            s.previous_next[j - 1] = i;
            --pending;
        }
    }

    // previous_next[m] is the latest stage <= i at which p_m improved.
    std::size_t max_m = 0;
    for (std::size_t j = 1; j <= n_; ++j) {
        if (!s.improvement[j - 1]) continue;
        std::size_t m = j;
        for (std::size_t cand = n_; cand > j; --cand) {
            if (s.previous_next[cand - 1] > s.previous[j - 1]) {
                m = cand;
                break;
            }
        }
        s.m[j - 1] = m;
        max_m = std::max(max_m, m);
    }

    s.entries.reserve(n_);
    for (std::size_t j = 1; j <= n_; ++j) {
        const auto& prev = last.entries[j - 1].as_tuple();
        const std::int64_t second = prev[1].as_integer();
        if (s.improvement[j - 1]) {
            const Rational third(1, static_cast<unsigned long>(*s.witness[j - 1] + 1));
            s.entries.push_back(composite_entry(j, s.m[j - 1] > j ? second + 1 : second, third, -1));
        } else if (j == max_m) {
            s.entries.push_back(composite_entry(j, second, prev[2].as_rational(), prev[3].as_integer() - 1));
        } else {
            s.entries.push_back(last.entries[j - 1]);
        }
        if (!order_->contains(s.entries.back())) {
            throw Error(ErrorCode::InvalidElement, "stage " + std::to_string(i) + " produced " + format(s.entries.back()));
        }
    }
    stages_.push_back(std::move(s));
}

const OrtStageEngine::Stage& OrtStageEngine::stage(std::size_t i) const {
    std::lock_guard lock(mutex_);
    while (stages_.size() <= i) compute_next();
    return stages_[i];
}

bool OrtStageEngine::improvement(std::size_t j, std::size_t i) const { return stage(i).improvement.at(j - 1); }
std::size_t OrtStageEngine::previous(std::size_t j, std::size_t i) const { return stage(i).previous.at(j - 1); }
std::optional<std::size_t> OrtStageEngine::witness(std::size_t j, std::size_t i) const {
    return stage(i).witness.at(j - 1);
}
const Element& OrtStageEngine::entry(std::size_t j, std::size_t i) const { return stage(i).entries.at(j - 1); }

LexTuple OrtStageEngine::row(std::size_t i) const {
    const auto& e = stage(i).entries;
    return LexTuple(std::vector<Element>(e.rbegin(), e.rend()));
}

std::vector<std::size_t> OrtStageEngine::improving(std::size_t i) const {
    std::vector<std::size_t> out;
    const auto& s = stage(i);
    for (std::size_t j = 1; j <= n_; ++j) {
        if (s.improvement[j - 1]) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> OrtStageEngine::m_values(std::size_t i) const { return stage(i).m; }

std::size_t OrtStageEngine::stages_computed() const {
    std::lock_guard lock(mutex_);
    return stages_.size();
}

EctWopImage ort_to_ectwop_forward(const OrtInstance& instance) {
    auto engine = std::make_shared<const OrtStageEngine>(instance);
    EctWopImage image;
    image.engine = engine;
    for (std::size_t j = 1; j <= engine->n(); ++j) {
        image.improvements.push_back(UnaryColorStream{
            2, Stream<std::size_t>::from_function(
                   [engine, j](std::size_t i) -> std::size_t { return engine->improvement(j, i) ? 1 : 0; })});
    }
    image.sigma = LexSequence{engine->order(), engine->n(),
                              Stream<LexTuple>::from_function([engine](std::size_t i) { return engine->row(i); })};
    return image;
}

ExtractionParams ExtractionParams::from_bounds(std::size_t n, std::span<const std::uint64_t> bounds,
                                               BackwardMutation mutation) {
    if (n == 0 || bounds.size() != n) throw Error(ErrorCode::ParamsOutOfRange, "need one ECT bound per color");
    ExtractionParams p;
    p.n = n;
    p.n0 = *std::max_element(bounds.begin(), bounds.end());
    p.m = n * (p.n0 + n);
    p.stride = mutation == BackwardMutation::StrideOffByOne ? n - 1 : n;
    return p;
}

Stream<std::size_t> ort_to_ectwop_backward(std::size_t n, std::span<const std::uint64_t> bounds,
                                           const Stream<Drawn>& x, BackwardMutation mutation) {
    const ExtractionParams params = ExtractionParams::from_bounds(n, bounds, mutation);
    auto decode = [x, params](std::size_t s) -> std::size_t {
        const Element& v = x.at(static_cast<std::size_t>(params.f(s))).value;
        if (!v.is_tuple() || v.as_tuple().size() != 4 || !v.as_tuple()[2].is_rational()) {
            throw Error(ErrorCode::NonUnitFraction, format(v) + " has no rational third coordinate");
        }
        const Rational& q = v.as_tuple()[2].as_rational();
        if (q.get_num() != 1 || q.get_den() < 1) throw Error(ErrorCode::NonUnitFraction, format(q));
        const BigInt k = q.get_den() - 1;
        if (!k.fits_ulong_p()) throw Error(ErrorCode::NonUnitFraction, format(q) + " is out of range");
        return static_cast<std::size_t>(k.get_ui());
    };
    return Stream<std::size_t>::from_function([decode](std::size_t s) -> std::size_t {
        const std::size_t y = decode(s);
        if (s > 0 && y <= decode(s - 1)) {
            throw Error(ErrorCode::NotIncreasing, "y_" + std::to_string(s) + " = " + std::to_string(y) +
                                                      " does not exceed y_" + std::to_string(s - 1));
        }
        return y;
    });
}

// ---- WOP(X -> X^n_lex) to WOP(X -> X^omega) ----------------------------

OmegaTerm lex_to_omega_term(const OrderRef& order, const LexTuple& row) {
    std::vector<OmegaPair> pairs;
    const std::size_t n = row.width();
    pairs.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pairs.push_back({n - t, row.entries()[t]});
    return OmegaTerm(order, std::move(pairs));
}

OmegaSequence lex_to_omega_forward(const LexSequence& sigma) {
    auto rows = sigma.rows;
    auto order = sigma.order;
    return {order, Stream<OmegaTerm>::from_function(
                       [rows, order](std::size_t i) { return lex_to_omega_term(order, rows.at(i)); })};
}

// ---- TC_N^n to WOP(X -> X^{2^n}_lex) ------------------------------------

std::uint64_t nth_prime(std::size_t m) {
    if (m == 0) throw Error(ErrorCode::ParamsOutOfRange, "primes are 1-based");
    std::uint64_t candidate = 1;
    for (std::size_t found = 0; found < m;) {
        ++candidate;
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= candidate && prime; ++d) prime = candidate % d != 0;
        if (prime) ++found;
    }
    return candidate;
}

Rational tcn_encode(const BigInt& count, std::span<const std::uint64_t> guesses, std::size_t stage) {
    BigInt den = 1;
    BigInt factor;
    for (std::size_t m = 1; m <= guesses.size(); ++m) {
        mpz_ui_pow_ui(factor.get_mpz_t(), nth_prime(m), guesses[m - 1]);
        den *= factor;
    }
    mpz_ui_pow_ui(factor.get_mpz_t(), nth_prime(guesses.size() + 1), stage);
    den *= factor;
    Rational out(count * den + 1, den);
    out.canonicalize();
    return out;
}

std::vector<std::uint64_t> tcn_decode(std::size_t n, const Rational& a, BackwardMutation mutation) {
    BigInt ceil;
    mpz_cdiv_q(ceil.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
    const BigInt c = ceil - 1;
    Rational frac = a - Rational(c);
    frac.canonicalize();
    if (frac.get_num() != 1) throw Error(ErrorCode::MalformedValue, format(a) + " has no unit-fraction offset");
    BigInt d = frac.get_den();
    const std::size_t shift = mutation == BackwardMutation::PrimeShift ? 1 : 0;
    std::vector<std::uint64_t> exps(n + 1, 0);
    for (std::size_t m = 1; m <= n + 1; ++m) {
        const BigInt p = nth_prime(m + shift);
        while (mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) {
            d /= p;
            ++exps[m - 1];
        }
    }
    if (d != 1) throw Error(ErrorCode::MalformedValue, format(a) + ": denominator has a foreign prime factor");
    exps.pop_back();
    return exps;
}

std::vector<std::uint64_t> tcn_to_lex_backward(std::size_t n, const Stream<Drawn>& x, BackwardMutation mutation,
                                               std::size_t scan_limit) {
    for (std::size_t t = 0; t < scan_limit; ++t) {
        const Element& v = x.at(t).value;
        if (v.is_infinity()) continue;
        if (!v.is_rational()) throw Error(ErrorCode::MalformedValue, format(v) + " is not in [0, inf]");
        return tcn_decode(n, v.as_rational(), mutation);
    }
    throw Error(ErrorCode::MalformedValue, "no finite term in the first " + std::to_string(scan_limit) + " elements");
}

TcnStageEngine::TcnStageEngine(std::vector<EnumerationStream> e, std::size_t stage_budget)
    : e_(std::move(e)), n_(e_.size()), budget_(stage_budget), order_(), resets_(n_ <= kMaxTcnWidth ? n_ : 0) {
    if (n_ == 0 || n_ > kMaxTcnWidth) {
        throw Error(ErrorCode::ParamsOutOfRange, "TC_N width must lie in [1, " + std::to_string(kMaxTcnWidth) + "]");
    }
    if (budget_ == 0) throw Error(ErrorCode::ParamsOutOfRange, "stage budget must be positive");
    order_ = subset_order(n_);
    seen_.assign(n_, {});
    next_counts_.resize(width());
    for (std::size_t j = 1; j <= width(); ++j) {
        next_counts_[j - 1] = static_cast<unsigned long>(width() - static_cast<std::size_t>(std::popcount(order_[j - 1])));
    }
}

void TcnStageEngine::compute_next() const {
    const std::size_t i = stages_.size();
    TcnStage s;
    s.guesses.resize(n_);
    for (std::size_t m = 1; m <= n_; ++m) {
        const std::uint64_t before = i == 0 ? 0 : stages_.back().guesses[m - 1];
        const std::uint64_t v = e_[m - 1].at(i);
        auto& seen = seen_[m - 1];
        if (v >= seen.size()) seen.resize(static_cast<std::size_t>(v) + 1, false);
        seen[static_cast<std::size_t>(v)] = true;
        if (v == before) s.u |= Subset{1} << (m - 1);
        std::uint64_t g = before;
        while (g < seen.size() && seen[static_cast<std::size_t>(g)]) ++g;
        s.guesses[m - 1] = g;
    }
    s.cycle = resets_.step(s.u);
    s.counts = next_counts_;
    const std::size_t ji = s.cycle.j;
    s.value = Element::rational(tcn_encode(s.counts[ji - 1], s.guesses, i));

    std::vector<Element> entries(width());  // index w - j
    for (std::size_t j = 1; j <= width(); ++j) {
        Element& slot = entries[width() - j];
        if (j > ji && i > 0) {
            slot = stages_.back().row.column(j);
        } else if (j == ji) {
            slot = s.value;
        } else {
            slot = Element::infinity();
        }
    }
    s.row = LexTuple(std::move(entries));

    if (s.counts[ji - 1] > running_max_) running_max_ = s.counts[ji - 1];
    const Subset vi = s.cycle.v;
    for (std::size_t j = 1; j <= width(); ++j) {
        const Subset aj = order_[j - 1];
        if ((aj & vi) == aj && aj != vi) {
            next_counts_[j - 1] = running_max_ + static_cast<unsigned long>(std::popcount(vi & ~aj));
        }
    }
    stages_.push_back(std::move(s));
}

const TcnStage& TcnStageEngine::stage(std::size_t i) const {
    if (i >= budget_) {
        throw Error(ErrorCode::StageBudgetExceeded, "stage " + std::to_string(i) + " exceeds the budget of " +
                                                        std::to_string(budget_));
    }
    std::lock_guard lock(mutex_);
    while (stages_.size() <= i) compute_next();
    return stages_[i];
}

std::size_t TcnStageEngine::stages_computed() const {
    std::lock_guard lock(mutex_);
    return stages_.size();
}

TcnLexImage tcn_to_lex_forward(const std::vector<EnumerationStream>& e, std::size_t stage_budget) {
    auto engine = std::make_shared<const TcnStageEngine>(e, stage_budget);
    auto order = make_order(LinearOrder::extended_nonneg_rationals());
    return {LexSequence{order, engine->width(),
                        Stream<LexTuple>::from_function([engine](std::size_t i) { return engine->stage(i).row; })},
            engine};
}

}  // namespace wopbench
