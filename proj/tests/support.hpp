#pragma once

#include <algorithm>
#include <vector>

#include "wopbench/order.hpp"
#include "wopbench/random.hpp"

namespace testsupport {

using namespace wopbench;

inline Element q(long num, unsigned long den = 1) { return Element::rational(num, den); }

inline Element small_rational(Rng& rng) {
    return Element::rational(rng.between(-10, 10), static_cast<unsigned long>(rng.between(1, 6)));
}

/// A random member of `x`, drawn from a small range so that ties are common.
inline Element sample(const LinearOrder& x, Rng& rng) {
    switch (x.kind()) {
        case OrderKind::Naturals: return Element::integer(rng.between(0, 20));
        case OrderKind::ReversedIntegers: return Element::integer(rng.between(-20, 20));
        case OrderKind::Rationals: return small_rational(rng);
        case OrderKind::FiniteChain: return Element::integer(rng.between(0, static_cast<std::int64_t>(x.parameter()) - 1));
        case OrderKind::ExtendedNonnegRationals:
            if (rng.chance(1, 8)) return Element::infinity();
            return Element::rational(rng.between(0, 10), static_cast<unsigned long>(rng.between(1, 4)));
        case OrderKind::LexProduct: {
            Element::Tuple parts;
            for (const auto& f : x.factors()) parts.push_back(sample(f, rng));
            return Element::tuple(std::move(parts));
        }
        case OrderKind::Composite: {
            const auto n = static_cast<std::int64_t>(x.parameter());
            return Element::tuple({Element::integer(rng.between(1, n)), Element::integer(rng.between(0, 5)),
                                   small_rational(rng), Element::integer(rng.between(-n, -1))});
        }
    }
    return Element::integer(0);
}

inline std::vector<LinearOrder> supported_orders() {
    return {LinearOrder::naturals(),
            LinearOrder::reversed_integers(),
            LinearOrder::rationals(),
            LinearOrder::finite_chain(5),
            LinearOrder::extended_nonneg_rationals(),
            LinearOrder::lex_product({LinearOrder::finite_chain(2), LinearOrder::rationals()}),
            LinearOrder::composite(3)};
}

/// Up to `max_pairs` pairs, exponents strictly decreasing below 6.
inline OmegaTerm random_term(const OrderRef& x, Rng& rng, std::size_t max_pairs = 3) {
    std::vector<std::uint64_t> exps;
    for (std::uint64_t e = 0; e < 6; ++e) exps.push_back(e);
    rng.shuffle(exps);
    exps.resize(rng.below(max_pairs + 1));
    std::sort(exps.rbegin(), exps.rend());
    std::vector<OmegaPair> pairs;
    for (auto e : exps) {
        Element c = sample(*x, rng);
        while (x->bottom() && c == *x->bottom()) c = sample(*x, rng);
        pairs.push_back({e, c});
    }
    return OmegaTerm(x, pairs);
}

}  // namespace testsupport
