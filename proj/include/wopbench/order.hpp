#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace wopbench {

using BigInt = mpz_class;
using Rational = mpq_class;

enum class Ordering { Less, Equal, Greater };

Ordering reverse(Ordering o);
std::string_view to_string(Ordering o);

template <typename T>
Ordering compare_values(const T& a, const T& b) {
    if (a < b) return Ordering::Less;
    if (b < a) return Ordering::Greater;
    return Ordering::Equal;
}

/// The top element of the extended nonnegative rationals.
struct Infinity {
    bool operator==(const Infinity&) const = default;
};

/// An element of one of the supported linear orders. Interpretation (and
/// membership) is always relative to a LinearOrder.
class Element {
public:
    using Tuple = std::vector<Element>;
    using Storage = std::variant<std::int64_t, Rational, Infinity, Tuple>;

    Element() : value_(std::int64_t{0}) {}

    static Element integer(std::int64_t v) { return Element(Storage(v)); }
    static Element rational(Rational q) {
        q.canonicalize();
        return Element(Storage(std::move(q)));
    }
    static Element rational(long num, unsigned long den) { return rational(Rational(num, den)); }
    static Element infinity() { return Element(Storage(Infinity{})); }
    static Element tuple(Tuple parts) { return Element(Storage(std::move(parts))); }

    bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }
    bool is_rational() const { return std::holds_alternative<Rational>(value_); }
    bool is_infinity() const { return std::holds_alternative<Infinity>(value_); }
    bool is_tuple() const { return std::holds_alternative<Tuple>(value_); }

    std::int64_t as_integer() const;
    const Rational& as_rational() const;
    const Tuple& as_tuple() const;

    const Storage& storage() const { return value_; }

    friend bool operator==(const Element& a, const Element& b);

private:
    explicit Element(Storage s) : value_(std::move(s)) {}
    Storage value_;
};

enum class OrderKind {
    Naturals,
    ReversedIntegers,
    Rationals,
    FiniteChain,
    ExtendedNonnegRationals,
    LexProduct,
    Composite,
};

/// A linear order on a concrete universe of Elements.
///
/// Composite(n) is the lexicographic product {1..n} x N x Q x {-n..-1}, each
/// factor in its natural order; its elements are 4-tuples (int, int, Q, int).
class LinearOrder {
public:
    static LinearOrder naturals() { return LinearOrder(OrderKind::Naturals, 0, {}); }
    static LinearOrder reversed_integers() { return LinearOrder(OrderKind::ReversedIntegers, 0, {}); }
    static LinearOrder rationals() { return LinearOrder(OrderKind::Rationals, 0, {}); }
    static LinearOrder finite_chain(std::size_t k);
    static LinearOrder extended_nonneg_rationals() {
        return LinearOrder(OrderKind::ExtendedNonnegRationals, 0, {});
    }
    static LinearOrder lex_product(std::vector<LinearOrder> factors);
    static LinearOrder composite(std::size_t n);

    OrderKind kind() const { return kind_; }
    /// k for FiniteChain, n for Composite, 0 otherwise.
    std::size_t parameter() const { return param_; }
    const std::vector<LinearOrder>& factors() const { return factors_; }

    bool contains(const Element& e) const;
    /// The designated "0" excluded from omega-term coefficients, if any.
    std::optional<Element> bottom() const;
    /// Three-way comparison; throws InvalidElement for non-members.
    Ordering compare(const Element& a, const Element& b) const;
    bool less(const Element& a, const Element& b) const { return compare(a, b) == Ordering::Less; }

    std::string name() const;

    friend bool operator==(const LinearOrder&, const LinearOrder&) = default;

private:
    LinearOrder(OrderKind kind, std::size_t param, std::vector<LinearOrder> factors)
        : kind_(kind), param_(param), factors_(std::move(factors)) {}

    Ordering compare_unchecked(const Element& a, const Element& b) const;

    OrderKind kind_;
    std::size_t param_;
    std::vector<LinearOrder> factors_;
};

using OrderRef = std::shared_ptr<const LinearOrder>;

inline OrderRef make_order(LinearOrder order) {
    return std::make_shared<const LinearOrder>(std::move(order));
}

struct OmegaPair {
    std::uint64_t exponent;
    Element coefficient;
};

/// Marker for components at or beyond the length of a term.
struct Undefined {
    bool operator==(const Undefined&) const = default;
};

using Component = std::variant<Undefined, std::uint64_t, Element>;

/// A finite term <(b0,a0),...,(bm,am)> of X^omega with b0 > b1 > ... > bm.
class OmegaTerm {
public:
    OmegaTerm(OrderRef base, std::vector<OmegaPair> pairs);

    const OrderRef& base() const { return base_; }
    const std::vector<OmegaPair>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }

    /// |t| = 2m + 2 for m + 1 pairs (0 for the empty term).
    std::size_t length() const { return 2 * pairs_.size(); }
    /// t(2k) = b_k, t(2k+1) = a_k, Undefined past the length.
    Component component(std::size_t s) const;

    bool is_proper_prefix_of(const OmegaTerm& other) const;

private:
    OrderRef base_;
    std::vector<OmegaPair> pairs_;
};

bool same_order(const OrderRef& a, const OrderRef& b);

Ordering cmp_omega_power(const LinearOrder& x, const OmegaTerm& s, const OmegaTerm& t);

/// A tuple (a_n,...,a_1) of X^n; entries()[0] holds a_n.
class LexTuple {
public:
    LexTuple() = default;
    explicit LexTuple(std::vector<Element> entries) : entries_(std::move(entries)) {}

    std::size_t width() const { return entries_.size(); }
    const std::vector<Element>& entries() const { return entries_; }
    /// Column accessor using the 1-based right-to-left index j in [1, width].
    const Element& column(std::size_t j) const { return entries_.at(width() - j); }

    friend bool operator==(const LexTuple&, const LexTuple&) = default;

private:
    std::vector<Element> entries_;
};

Ordering cmp_lex_tuple(const LinearOrder& x, const LexTuple& u, const LexTuple& v);

/// Positional evaluation of a base-alpha term as the natural number it denotes.
BigInt cnf_value(std::uint64_t alpha, const OmegaTerm& t);
/// Independent oracle: compares two terms over FiniteChain(alpha) by value.
Ordering cmp_via_cnf_oracle(std::uint64_t alpha, const OmegaTerm& s, const OmegaTerm& t);

/// An element of a solution sequence together with the index of the term it
/// was drawn from.
struct Drawn {
    Element value;
    std::size_t term = 0;

    friend bool operator==(const Drawn&, const Drawn&) = default;
};

bool is_coefficient_of(const LinearOrder& x, const Element& e, const OmegaTerm& t);
bool is_entry_of(const LinearOrder& x, const Element& e, const LexTuple& t);

bool is_contained(const LinearOrder& x, std::span<const Drawn> inner, std::span<const OmegaTerm> sigma);
bool is_contained(const LinearOrder& x, std::span<const Drawn> inner, std::span<const LexTuple> sigma);

// Text formats: rational "p/q", infinity "inf", tuple "(x,y,...)",
// omega term "[(b0,a0);(b1,a1)]", lex tuple "(a_n,...,a_1)".
std::string format(const Element& e);
std::string format(const Rational& q);
std::string format(const OmegaTerm& t);
std::string format(const LexTuple& t);

Element parse_element(const LinearOrder& x, std::string_view text);
OmegaTerm parse_omega_term(const OrderRef& x, std::string_view text);
LexTuple parse_lex_tuple(const LinearOrder& x, std::string_view text);

}  // namespace wopbench
