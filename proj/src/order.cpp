#include "wopbench/order.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "wopbench/error.hpp"

namespace wopbench {

Ordering reverse(Ordering o) {
    switch (o) {
        case Ordering::Less: return Ordering::Greater;
        case Ordering::Greater: return Ordering::Less;
        case Ordering::Equal: return Ordering::Equal;
    }
    return o;
}

std::string_view to_string(Ordering o) {
    switch (o) {
        case Ordering::Less: return "Less";
        case Ordering::Equal: return "Equal";
        case Ordering::Greater: return "Greater";
    }
    return "?";
}

std::int64_t Element::as_integer() const {
    if (!is_integer()) throw Error(ErrorCode::InvalidElement, "expected integer, got " + format(*this));
    return std::get<std::int64_t>(value_);
}

const Rational& Element::as_rational() const {
    if (!is_rational()) throw Error(ErrorCode::InvalidElement, "expected rational, got " + format(*this));
    return std::get<Rational>(value_);
}

const Element::Tuple& Element::as_tuple() const {
    if (!is_tuple()) throw Error(ErrorCode::InvalidElement, "expected tuple, got " + format(*this));
    return std::get<Tuple>(value_);
}

bool operator==(const Element& a, const Element& b) {
    if (a.value_.index() != b.value_.index()) return false;
    return std::visit(
        [&](const auto& lhs) {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.value_);
            if constexpr (std::is_same_v<T, Rational>) {
                return cmp(lhs, rhs) == 0;
            } else {
                return lhs == rhs;
            }
        },
        a.value_);
}

LinearOrder LinearOrder::finite_chain(std::size_t k) {
    if (k == 0) throw Error(ErrorCode::ParamsOutOfRange, "finite chain needs at least one element");
    return LinearOrder(OrderKind::FiniteChain, k, {});
}

LinearOrder LinearOrder::lex_product(std::vector<LinearOrder> factors) {
    if (factors.empty()) throw Error(ErrorCode::EmptyList, "lex product without factors");
    return LinearOrder(OrderKind::LexProduct, 0, std::move(factors));
}

LinearOrder LinearOrder::composite(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::ParamsOutOfRange, "composite order needs n >= 1");
    return LinearOrder(OrderKind::Composite, n, {});
}

bool LinearOrder::contains(const Element& e) const {
    switch (kind_) {
        case OrderKind::Naturals:
            return e.is_integer() && e.as_integer() >= 0;
        case OrderKind::ReversedIntegers:
            return e.is_integer();
        case OrderKind::Rationals:
            return e.is_rational();
        case OrderKind::FiniteChain:
            return e.is_integer() && e.as_integer() >= 0 &&
                   static_cast<std::uint64_t>(e.as_integer()) < param_;
        case OrderKind::ExtendedNonnegRationals:
            return e.is_infinity() || (e.is_rational() && sgn(e.as_rational()) >= 0);
        case OrderKind::LexProduct: {
            if (!e.is_tuple()) return false;
            const auto& parts = e.as_tuple();
            if (parts.size() != factors_.size()) return false;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (!factors_[i].contains(parts[i])) return false;
            }
            return true;
        }
        case OrderKind::Composite: {
            if (!e.is_tuple()) return false;
            const auto& p = e.as_tuple();
            if (p.size() != 4) return false;
            if (!p[0].is_integer() || !p[1].is_integer() || !p[2].is_rational() || !p[3].is_integer())
                return false;
            const auto n = static_cast<std::int64_t>(param_);
            const auto first = p[0].as_integer();
            const auto last = p[3].as_integer();
            return first >= 1 && first <= n && p[1].as_integer() >= 0 && last >= -n && last <= -1;
        }
    }
    return false;
}

std::optional<Element> LinearOrder::bottom() const {
    if (kind_ == OrderKind::FiniteChain) return Element::integer(0);
    return std::nullopt;
}

Ordering LinearOrder::compare(const Element& a, const Element& b) const {
    if (!contains(a)) throw Error(ErrorCode::InvalidElement, format(a) + " is not in " + name());
    if (!contains(b)) throw Error(ErrorCode::InvalidElement, format(b) + " is not in " + name());
    return compare_unchecked(a, b);
}

Ordering LinearOrder::compare_unchecked(const Element& a, const Element& b) const {
    switch (kind_) {
        case OrderKind::Naturals:
        case OrderKind::FiniteChain:
            return compare_values(a.as_integer(), b.as_integer());
        case OrderKind::ReversedIntegers:
            return compare_values(b.as_integer(), a.as_integer());
        case OrderKind::Rationals: {
            const int c = cmp(a.as_rational(), b.as_rational());
            return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
        }
        case OrderKind::ExtendedNonnegRationals: {
            if (a.is_infinity() || b.is_infinity()) {
                if (a.is_infinity() && b.is_infinity()) return Ordering::Equal;
                return a.is_infinity() ? Ordering::Greater : Ordering::Less;
            }
            const int c = cmp(a.as_rational(), b.as_rational());
            return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
        }
        case OrderKind::LexProduct: {
            const auto& pa = a.as_tuple();
            const auto& pb = b.as_tuple();
            for (std::size_t i = 0; i < factors_.size(); ++i) {
                const auto o = factors_[i].compare_unchecked(pa[i], pb[i]);
                if (o != Ordering::Equal) return o;
            }
            return Ordering::Equal;
        }
        case OrderKind::Composite: {
            const auto& pa = a.as_tuple();
            const auto& pb = b.as_tuple();
            for (std::size_t i = 0; i < 4; ++i) {
                Ordering o;
                if (i == 2) {
                    const int c = cmp(pa[i].as_rational(), pb[i].as_rational());
                    o = c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
                } else {
                    o = compare_values(pa[i].as_integer(), pb[i].as_integer());
                }
                if (o != Ordering::Equal) return o;
            }
            return Ordering::Equal;
        }
    }
    return Ordering::Equal;
}

std::string LinearOrder::name() const {
    switch (kind_) {
        case OrderKind::Naturals: return "N";
        case OrderKind::ReversedIntegers: return "Z*";
        case OrderKind::Rationals: return "Q";
        case OrderKind::FiniteChain: return "chain(" + std::to_string(param_) + ")";
        case OrderKind::ExtendedNonnegRationals: return "Q+inf";
        case OrderKind::Composite: return "composite(" + std::to_string(param_) + ")";
        case OrderKind::LexProduct: {
            std::string out = "lex(";
            for (std::size_t i = 0; i < factors_.size(); ++i) {
                if (i) out += ",";
                out += factors_[i].name();
            }
            return out + ")";
        }
    }
    return "?";
}

OmegaTerm::OmegaTerm(OrderRef base, std::vector<OmegaPair> pairs)
    : base_(std::move(base)), pairs_(std::move(pairs)) {
    if (!base_) throw Error(ErrorCode::InvalidTerm, "omega term without base order");
    const auto zero = base_->bottom();
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (i > 0 && pairs_[i - 1].exponent <= pairs_[i].exponent) {
            throw Error(ErrorCode::InvalidTerm, "exponents must strictly decrease");
        }
        if (!base_->contains(pairs_[i].coefficient)) {
            throw Error(ErrorCode::InvalidElement,
                        format(pairs_[i].coefficient) + " is not in " + base_->name());
        }
        if (zero && pairs_[i].coefficient == *zero) {
            throw Error(ErrorCode::InvalidTerm, "coefficient equals the bottom element");
        }
    }
}

Component OmegaTerm::component(std::size_t s) const {
    if (s >= length()) return Undefined{};
    const auto& p = pairs_[s / 2];
    if (s % 2 == 0) return p.exponent;
    return p.coefficient;
}

bool OmegaTerm::is_proper_prefix_of(const OmegaTerm& other) const {
    if (pairs_.size() >= other.pairs_.size()) return false;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (pairs_[i].exponent != other.pairs_[i].exponent) return false;
        if (!(pairs_[i].coefficient == other.pairs_[i].coefficient)) return false;
    }
    return true;
}

bool same_order(const OrderRef& a, const OrderRef& b) {
    return a == b || (a && b && *a == *b);
}

Ordering cmp_omega_power(const LinearOrder& x, const OmegaTerm& s, const OmegaTerm& t) {
    if (!(*s.base() == x) || !(*t.base() == x)) {
        throw Error(ErrorCode::MismatchedBaseOrder,
                    "terms over " + s.base()->name() + " and " + t.base()->name() + " compared in " + x.name());
    }
    const auto& sp = s.pairs();
    const auto& tp = t.pairs();
    const std::size_t common = std::min(sp.size(), tp.size());
    for (std::size_t j = 0; j < common; ++j) {
        if (sp[j].exponent != tp[j].exponent) return compare_values(sp[j].exponent, tp[j].exponent);
        const auto o = x.compare(sp[j].coefficient, tp[j].coefficient);
        if (o != Ordering::Equal) return o;
    }
    return compare_values(sp.size(), tp.size());
}

Ordering cmp_lex_tuple(const LinearOrder& x, const LexTuple& u, const LexTuple& v) {
    if (u.width() != v.width()) {
        throw Error(ErrorCode::WidthMismatch,
                    "widths " + std::to_string(u.width()) + " and " + std::to_string(v.width()));
    }
    for (std::size_t i = 0; i < u.width(); ++i) {
        const auto o = x.compare(u.entries()[i], v.entries()[i]);
        if (o != Ordering::Equal) return o;
    }
    return Ordering::Equal;
}

BigInt cnf_value(std::uint64_t alpha, const OmegaTerm& t) {
    if (alpha < 2) throw Error(ErrorCode::ParamsOutOfRange, "alpha must be at least 2");
    if (!(*t.base() == LinearOrder::finite_chain(alpha))) {
        throw Error(ErrorCode::MismatchedBaseOrder, "oracle needs terms over chain(" + std::to_string(alpha) + ")");
    }
    BigInt value = 0;
    for (const auto& p : t.pairs()) {
        const auto a = p.coefficient.as_integer();
        if (a <= 0 || static_cast<std::uint64_t>(a) >= alpha) {
            throw Error(ErrorCode::CoefficientOutOfRange, "coefficient " + std::to_string(a));
        }
        BigInt power;
        mpz_ui_pow_ui(power.get_mpz_t(), alpha, p.exponent);
        value += power * static_cast<unsigned long>(a);
    }
    return value;
}

Ordering cmp_via_cnf_oracle(std::uint64_t alpha, const OmegaTerm& s, const OmegaTerm& t) {
    return compare_values(cnf_value(alpha, s), cnf_value(alpha, t));
}

bool is_coefficient_of(const LinearOrder& x, const Element& e, const OmegaTerm& t) {
    return std::any_of(t.pairs().begin(), t.pairs().end(), [&](const OmegaPair& p) {
        return x.contains(e) && x.compare(p.coefficient, e) == Ordering::Equal;
    });
}

bool is_entry_of(const LinearOrder& x, const Element& e, const LexTuple& t) {
    return std::any_of(t.entries().begin(), t.entries().end(), [&](const Element& a) {
        return x.contains(e) && x.compare(a, e) == Ordering::Equal;
    });
}

namespace {

template <typename Term, typename Membership>
bool contained_impl(std::span<const Drawn> inner, std::span<const Term> sigma, Membership member) {
    std::size_t last = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const auto& d = inner[i];
        if (d.term >= sigma.size()) return false;
        if (i > 0 && d.term < last) return false;
        if (!member(d.value, sigma[d.term])) return false;
        last = d.term;
    }
    return true;
}

}  // namespace

bool is_contained(const LinearOrder& x, std::span<const Drawn> inner, std::span<const OmegaTerm> sigma) {
    return contained_impl(inner, sigma, [&](const Element& e, const OmegaTerm& t) { return is_coefficient_of(x, e, t); });
}

bool is_contained(const LinearOrder& x, std::span<const Drawn> inner, std::span<const LexTuple> sigma) {
    return contained_impl(inner, sigma, [&](const Element& e, const LexTuple& t) { return is_entry_of(x, e, t); });
}

std::string format(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format(const Element& e) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, Rational>) {
                return format(v);
            } else if constexpr (std::is_same_v<T, Infinity>) {
                return "inf";
            } else {
                std::string out = "(";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ",";
                    out += format(v[i]);
                }
                return out + ")";
            }
        },
        e.storage());
}

std::string format(const OmegaTerm& t) {
    std::string out = "[";
    for (std::size_t i = 0; i < t.pairs().size(); ++i) {
        if (i) out += ";";
        out += "(" + std::to_string(t.pairs()[i].exponent) + "," + format(t.pairs()[i].coefficient) + ")";
    }
    return out + "]";
}

std::string format(const LexTuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.width(); ++i) {
        if (i) out += ",";
        out += format(t.entries()[i]);
    }
    return out + ")";
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ == text_.size();
    }
    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    std::string_view token() {
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != ';' &&
               text_[pos_] != ']' && text_[pos_] != ' ') {
            ++pos_;
        }
        if (start == pos_) fail("expected a value");
        return text_.substr(start, pos_ - start);
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::ParseError, why + " at offset " + std::to_string(pos_) + " in '" +
                                               std::string(text_) + "'");
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::int64_t parse_int(Cursor& cur, std::string_view tok) {
    std::int64_t v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) cur.fail("bad integer '" + std::string(tok) + "'");
    return v;
}

Rational parse_rational(Cursor& cur, std::string_view tok) {
    Rational q;
    if (q.set_str(std::string(tok), 10) != 0) cur.fail("bad rational '" + std::string(tok) + "'");
    if (q.get_den() == 0) cur.fail("zero denominator");
    q.canonicalize();
    return q;
}

Element parse_in(const LinearOrder& x, Cursor& cur) {
    switch (x.kind()) {
        case OrderKind::Naturals:
        case OrderKind::ReversedIntegers:
        case OrderKind::FiniteChain:
            return Element::integer(parse_int(cur, cur.token()));
        case OrderKind::Rationals:
            return Element::rational(parse_rational(cur, cur.token()));
        case OrderKind::ExtendedNonnegRationals: {
            const auto tok = cur.token();
            if (tok == "inf") return Element::infinity();
            return Element::rational(parse_rational(cur, tok));
        }
        case OrderKind::LexProduct: {
            cur.expect('(');
            Element::Tuple parts;
            for (std::size_t i = 0; i < x.factors().size(); ++i) {
                if (i) cur.expect(',');
                parts.push_back(parse_in(x.factors()[i], cur));
            }
            cur.expect(')');
            return Element::tuple(std::move(parts));
        }
        case OrderKind::Composite: {
            cur.expect('(');
            Element::Tuple parts;
            parts.push_back(Element::integer(parse_int(cur, cur.token())));
            cur.expect(',');
            parts.push_back(Element::integer(parse_int(cur, cur.token())));
            cur.expect(',');
            parts.push_back(Element::rational(parse_rational(cur, cur.token())));
            cur.expect(',');
            parts.push_back(Element::integer(parse_int(cur, cur.token())));
            cur.expect(')');
            return Element::tuple(std::move(parts));
        }
    }
    cur.fail("unsupported order");
}

}  // namespace

Element parse_element(const LinearOrder& x, std::string_view text) {
    Cursor cur(text);
    auto e = parse_in(x, cur);
    if (!cur.at_end()) cur.fail("trailing input");
    if (!x.contains(e)) throw Error(ErrorCode::InvalidElement, format(e) + " is not in " + x.name());
    return e;
}

OmegaTerm parse_omega_term(const OrderRef& x, std::string_view text) {
    Cursor cur(text);
    cur.expect('[');
    std::vector<OmegaPair> pairs;
    if (!cur.peek(']')) {
        do {
            cur.expect('(');
            const auto b = parse_int(cur, cur.token());
            if (b < 0) cur.fail("negative exponent");
            cur.expect(',');
            auto a = parse_in(*x, cur);
            cur.expect(')');
            pairs.push_back({static_cast<std::uint64_t>(b), std::move(a)});
        } while (cur.accept(';'));
    }
    cur.expect(']');
    if (!cur.at_end()) cur.fail("trailing input");
    return OmegaTerm(x, std::move(pairs));
}

LexTuple parse_lex_tuple(const LinearOrder& x, std::string_view text) {
    Cursor cur(text);
    cur.expect('(');
    std::vector<Element> entries;
    do {
        entries.push_back(parse_in(x, cur));
        if (!x.contains(entries.back())) {
            throw Error(ErrorCode::InvalidElement, format(entries.back()) + " is not in " + x.name());
        }
    } while (cur.accept(','));
    cur.expect(')');
    if (!cur.at_end()) cur.fail("trailing input");
    return LexTuple(std::move(entries));
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MismatchedBaseOrder: return "MismatchedBaseOrder";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::CoefficientOutOfRange: return "CoefficientOutOfRange";
        case ErrorCode::InvalidElement: return "InvalidElement";
        case ErrorCode::InvalidTerm: return "InvalidTerm";
        case ErrorCode::InfinityArithmetic: return "InfinityArithmetic";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ColorOutOfRange: return "ColorOutOfRange";
        case ErrorCode::NotAPartialOrder: return "NotAPartialOrder";
        case ErrorCode::UnknownTag: return "UnknownTag";
        case ErrorCode::ParamsOutOfRange: return "ParamsOutOfRange";
        case ErrorCode::CertificateMismatch: return "CertificateMismatch";
        case ErrorCode::LengthOverflow: return "LengthOverflow";
        case ErrorCode::NotDescending: return "NotDescending";
        case ErrorCode::EvenColor: return "EvenColor";
        case ErrorCode::NotHomogeneous: return "NotHomogeneous";
        case ErrorCode::EmptyList: return "EmptyList";
        case ErrorCode::NotRightOrdered: return "NotRightOrdered";
        case ErrorCode::NonUnitFraction: return "NonUnitFraction";
        case ErrorCode::NotIncreasing: return "NotIncreasing";
        case ErrorCode::StageBudgetExceeded: return "StageBudgetExceeded";
        case ErrorCode::MalformedValue: return "MalformedValue";
        case ErrorCode::ExponentOverflow: return "ExponentOverflow";
        case ErrorCode::UnknownCandidate: return "UnknownCandidate";
        case ErrorCode::UnknownReduction: return "UnknownReduction";
    }
    return "Unknown";
}

}  // namespace wopbench
