#include "wopbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "wopbench/adversary.hpp"
#include "wopbench/error.hpp"
#include "wopbench/random.hpp"

namespace wopbench {

namespace {

using Clock = std::chrono::steady_clock;

/// A failed check inside a trial; the label becomes the trial verdict.
struct TrialFailure : std::runtime_error {
    TrialFailure(std::string label, const std::string& detail) : std::runtime_error(detail), label(std::move(label)) {}
    std::string label;
};

void require(const ValidationReport& r, const std::string& label, const std::string& what) {
    if (!r.ok) throw TrialFailure(label, what + ": " + r.detail);
}

void require(bool ok, const std::string& label, const std::string& what) {
    if (!ok) throw TrialFailure(label, what);
}

struct TrialContext {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    std::optional<CertifiedInstance> source;
};

using TrialFn = std::function<void(TrialContext&)>;

std::uint64_t trial_seed(std::uint64_t seed, std::size_t id) { return Rng::mix(seed ^ Rng::mix(id + 1)); }

TrialRecord run_one(std::size_t id, std::uint64_t seed, const TrialFn& fn) {
    TrialContext ctx{id, trial_seed(seed, id), std::nullopt};
    TrialRecord rec;
    rec.id = id;
    try {
        fn(ctx);
        rec.verdict = "pass";
        return rec;
    } catch (const TrialFailure& f) {
        rec.verdict = f.label;
        rec.detail = f.what();
    } catch (const Error& e) {
        rec.verdict = std::string(to_string(e.code()));
        rec.detail = e.what();
    } catch (const std::exception& e) {
        rec.verdict = "Exception";
        rec.detail = e.what();
    }
    if (ctx.source) {
        try {
            rec.fixture = to_fixture(*ctx.source, 16);
        } catch (const std::exception& e) {
            rec.fixture = {{"error", e.what()}};
        }
    }
    return rec;
}

std::vector<TrialRecord> run_trials(const RunConfig& cfg, const TrialFn& fn) {
    std::vector<TrialRecord> records(cfg.trials);
    std::size_t workers = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(cfg.trials, 1));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t id = next++; id < cfg.trials; id = next++) records[id] = run_one(id, cfg.seed, fn);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return records;
}

template <typename T>
Stream<T> stream_of(std::vector<T> values) {
    auto shared = std::make_shared<const std::vector<T>>(std::move(values));
    return Stream<T>::from_function([shared](std::size_t i) -> T {
        if (i >= shared->size()) throw Error(ErrorCode::StageBudgetExceeded, "finite prefix exhausted");
        return (*shared)[i];
    });
}

std::string describe(const std::vector<std::size_t>& v, std::size_t limit = 8) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size() && i < limit; ++i) out += (i ? "," : "") + std::to_string(v[i]);
    if (v.size() > limit) out += ",...";
    return out + "]";
}

// ---- per-reduction trials ------------------------------------------------

const char* const kWopOrders[] = {"Q", "Z*", "composite"};

void trial_wop_to_ort(TrialContext& ctx, const RunConfig& cfg) {
    GenParams params;
    params.n = 3;
    params.order = kWopOrders[ctx.id % 3];
    ctx.source = gen_certified_instance(ProblemTag::WopOmega, ctx.seed, params);
    const auto& sigma = std::get<OmegaSequence>(ctx.source->instance);
    const auto& wc = std::get<WopCert>(ctx.source->certificate);
    require(validate_descending(sigma, cfg.depth), "NotDescending", "source instance");

    const WopToOrtImage image = wop_to_ort_forward(sigma);
    require(validate_right_ordered(image.instance.poset, image.instance.coloring, cfg.depth), "NotRightOrdered",
            "forward image");

    // Transport: rows carrying the witness agree up to the planted slot.
    auto witness = wc.witness;
    auto h = Stream<std::size_t>::from_function([witness](std::size_t t) { return witness.at(t).term; });
    require(validate_ort_solution(image.instance, h.take(100)), "NotHomogeneous", "transported homogeneous set");
    require(image.instance.coloring(h.at(0), h.at(1)) == wc.planted_position, "CertificateMismatch",
            "transported color differs from the planted slot");

    const auto out = wop_to_ort_backward(sigma, h, cfg.mutation).take(100);
    require(validate_wop_solution(sigma, out), "NotContained", "backward output");
}

OrtCert ort_cert(const CertifiedInstance& ci) { return std::get<OrtCert>(ci.certificate); }

std::vector<CertifiedInstance> staircase_components(const TrialContext& ctx, std::size_t count, std::size_t max_size) {
    Rng rng(ctx.seed);
    const std::uint64_t schedule_seed = rng.next();
    std::vector<CertifiedInstance> parts;
    for (std::size_t t = 0; t < count; ++t) {
        GenParams params;
        params.n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_size)));
        params.schedule_seed = schedule_seed;
        parts.push_back(gen_certified_instance(ProblemTag::Ort, rng.next(), params));
    }
    return parts;
}

struct ProductSetup {
    std::vector<CertifiedInstance> parts;
    std::vector<OrtInstance> instances;
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> colors;
    OrtInstance product;
    Stream<std::size_t> homogeneous;
    StaircaseSchedule schedule;
};

ProductSetup product_setup(TrialContext& ctx, std::size_t count, std::size_t max_size) {
    ProductSetup s;
    s.parts = staircase_components(ctx, count, max_size);
    ctx.source = s.parts.front();
    for (const auto& p : s.parts) {
        s.instances.push_back(std::get<OrtInstance>(p.instance));
        s.sizes.push_back(s.instances.back().poset.size());
        s.colors.push_back(ort_cert(p).true_color);
    }
    s.product = ort_product_forward(s.instances);
    // Shared schedule seed: every component plants the same homogeneous set.
    s.homogeneous = ort_cert(s.parts.front()).homogeneous;
    s.schedule = *ort_cert(s.parts.front()).schedule;
    for (const auto& p : s.parts) {
        require(ort_cert(p).homogeneous.take(32) == s.homogeneous.take(32), "CertificateMismatch",
                "components plant different homogeneous sets");
    }
    return s;
}

void check_components(const ProductSetup& s, const std::vector<Stream<std::size_t>>& streams) {
    require(streams.size() == s.parts.size(), "WidthMismatch", "backward returned the wrong number of sets");
    for (std::size_t t = 0; t < streams.size(); ++t) {
        const auto h = streams[t].take(100);
        require(validate_ort_solution(s.instances[t], h), "NotHomogeneous", "component " + std::to_string(t));
        require(s.instances[t].coloring(h[0], h[1]) == s.colors[t], "WrongColor", "component " + std::to_string(t));
    }
}

void trial_ort_product(TrialContext& ctx, const RunConfig& cfg) {
    ProductSetup s = product_setup(ctx, 2, 3);
    require(validate_right_ordered(s.product.poset, s.product.coloring, cfg.depth), "NotRightOrdered", "product image");
    const auto h = s.homogeneous.take(100);
    require(validate_ort_solution(s.product, h), "NotHomogeneous", "planted set on the product");
    require(s.product.coloring(h[0], h[1]) == encode_product_color(s.sizes, s.colors), "WrongColor",
            "product color is not the tuple of component colors");
    check_components(s, ort_product_backward(s.homogeneous, s.parts.size()));
}

void check_pipeline(const OrtInstance& ort, const EctWopImage& image, const OrtPipelineCert& cert,
                    const Stream<Drawn>& x, const RunConfig& cfg, const LexSequence* lex, const OmegaSequence* omega,
                    std::vector<std::size_t>* y_out) {
    const std::size_t n = image.engine->n();
    for (std::size_t j = 0; j < n; ++j) {
        require(validate_ect_solution(image.improvements[j], cert.ect_certs[j], cert.ect_bounds[j], cfg.depth),
                "InvalidBound", "ECT bound for color " + std::to_string(j + 1));
    }
    const auto params = ExtractionParams::from_bounds(n, cert.ect_bounds);
    constexpr std::size_t kEmitted = 64;
    const auto xs = x.take(static_cast<std::size_t>(params.f(kEmitted - 1)) + 1);
    if (lex) require(validate_wop_solution(*lex, xs), "NotContained", "certified Sigma solution");
    if (omega) require(validate_wop_solution(*omega, xs), "NotContained", "certified solution of the omega image");

    const auto y = ort_to_ectwop_backward(n, cert.ect_bounds, x, cfg.mutation).take(kEmitted);
    require(validate_ort_solution(ort, y), "NotHomogeneous", "extracted set " + describe(y));
    require(ort.coloring(y[0], y[1]) == cert.color, "WrongColor",
            "extracted color " + std::to_string(ort.coloring(y[0], y[1])) + " but p_j* = " + std::to_string(cert.color));
    if (y_out) *y_out = y;
}

void trial_ort_to_ectwop(TrialContext& ctx, const RunConfig& cfg) {
    GenParams params;
    params.n = ctx.id % 3 + 2;
    ctx.source = gen_certified_instance(ProblemTag::Ort, ctx.seed, params);
    const auto& ort = std::get<OrtInstance>(ctx.source->instance);
    const auto oc = ort_cert(*ctx.source);
    require(validate_ort_solution(ort, oc.homogeneous.take(100)), "NotHomogeneous", "planted staircase set");

    const EctWopImage image = ort_to_ectwop_forward(ort);
    require(validate_descending(image.sigma, cfg.depth), "NotDescending", "Sigma stream");
    const OrtPipelineCert cert = transport_ort_certificate(image, *oc.schedule);
    check_pipeline(ort, image, cert, certified_sigma_solution(image, cert), cfg, &image.sigma, nullptr, nullptr);
}

void trial_full_pipeline(TrialContext& ctx, const RunConfig& cfg) {
    ProductSetup s = product_setup(ctx, 2, 2);
    const EctWopImage image = ort_to_ectwop_forward(s.product);
    const OmegaSequence omega = lex_to_omega_forward(image.sigma);
    require(validate_descending(omega, cfg.depth), "NotDescending", "omega image of Sigma");
    const OrtPipelineCert cert = transport_ort_certificate(image, s.schedule);
    // The omega image has the same coefficients row by row, so the Sigma
    // solution transports unchanged.
    const Stream<Drawn> x = lex_to_omega_backward(certified_sigma_solution(image, cert));
    std::vector<std::size_t> y;
    check_pipeline(s.product, image, cert, x, cfg, nullptr, &omega, &y);
    const auto parts = decode_product_color(s.sizes, cert.color);
    for (std::size_t t = 0; t < parts.size(); ++t) {
        require(s.instances[t].coloring(y[0], y[1]) == parts[t], "WrongColor", "component " + std::to_string(t));
    }
    auto streams = ort_product_backward(stream_of(y), s.parts.size());
    for (std::size_t t = 0; t < streams.size(); ++t) {
        require(validate_ort_solution(s.instances[t], streams[t].take(y.size())), "NotHomogeneous",
                "component " + std::to_string(t));
    }
}

void trial_lex_to_omega(TrialContext& ctx, const RunConfig& cfg) {
    GenParams params;
    params.n = ctx.id % 5 + 1;
    params.order = kWopOrders[(ctx.id / 5) % 3];
    ctx.source = gen_certified_instance(ProblemTag::WopLex, ctx.seed, params);
    const auto& lex = std::get<LexSequence>(ctx.source->instance);
    const auto& wc = std::get<WopCert>(ctx.source->certificate);
    require(validate_descending(lex, cfg.depth), "NotDescending", "source instance");
    const OmegaSequence omega = lex_to_omega_forward(lex);
    require(validate_descending(omega, cfg.depth), "NotDescending", "omega image");
    // Column j of row i is the coefficient of omega^j in term i.
    const auto solved = wc.witness.take(100);
    require(validate_wop_solution(omega, solved), "NotContained", "witness in the omega image");
    const auto back = lex_to_omega_backward(wc.witness).take(100);
    require(validate_wop_solution(lex, back), "NotContained", "backward output");
}

void trial_tcn_to_lex(TrialContext& ctx, const RunConfig& cfg) {
    GenParams params;
    params.n = ctx.id % 3 + 1;
    ctx.source = gen_certified_instance(ProblemTag::Tcn, ctx.seed, params);
    const auto& streams = std::get<std::vector<EnumerationStream>>(ctx.source->instance);
    const auto& tc = std::get<TcnCert>(ctx.source->certificate);
    const TcnLexImage image = tcn_to_lex_forward(streams, cfg.stage_budget);
    require(validate_descending(image.sigma, cfg.stage_budget), "NotDescending", "Sigma stream");
    const std::size_t n = params.n;
    for (std::size_t i = 0; i < cfg.stage_budget; ++i) {
        const TcnStage& st = image.engine->stage(i);
        require(tcn_decode(n, st.value.as_rational(), cfg.mutation) == st.guesses, "DecodeMismatch",
                "encode/decode at stage " + std::to_string(i));
    }
    const TcnRunCert rc = transport_tcn_certificate(image, tc);
    const auto x = certified_tcn_solution(image, rc);
    require(validate_wop_solution(image.sigma, x), "NotContained", "certified solution");
    const auto answer = tcn_to_lex_backward(n, stream_of(x), cfg.mutation, x.size());
    require(validate_tcn_solution(tc, answer), "WrongGuess", "decoded guesses");
}

}  // namespace

// ---- reporting ----------------------------------------------------------

std::string_view to_string(BackwardMutation m) {
    switch (m) {
        case BackwardMutation::None: return "none";
        case BackwardMutation::StrideOffByOne: return "stride";
        case BackwardMutation::ParityFlip: return "parity";
        case BackwardMutation::PrimeShift: return "prime-shift";
    }
    return "?";
}

BackwardMutation parse_mutation(std::string_view text) {
    for (auto m : {BackwardMutation::None, BackwardMutation::StrideOffByOne, BackwardMutation::ParityFlip,
                   BackwardMutation::PrimeShift}) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorCode::ParamsOutOfRange, "unknown mutation " + std::string(text));
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json j = deterministic_view(r);
    j["wall_ms"] = r.wall_ms;
    return j;
}

nlohmann::json deterministic_view(const Report& r) {
    auto trials = nlohmann::json::array();
    for (const auto& t : r.trials) {
        nlohmann::json tj{{"id", t.id}, {"verdict", t.verdict}, {"detail", t.detail}};
        if (!t.fixture.is_null()) tj["fixture"] = t.fixture;
        trials.push_back(std::move(tj));
    }
    nlohmann::json j{{"schema", kReportSchema}, {"command", r.command}, {"config", r.config}, {"trials", trials},
                     {"pass", r.pass}};
    if (!r.transcript.empty()) j["transcript"] = r.transcript;
    return j;
}

void write_report(const Report& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
    out << to_json(report).dump(2) << "\n";
}

// ---- certified solving ------------------------------------------------

SolutionStream certified_solve(ProblemTag tag, const Instance& instance, const Certificate& certificate) {
    auto mismatch = [&](const char* what) -> SolutionStream {
        throw Error(ErrorCode::CertificateMismatch, std::string(what) + " for " + std::string(to_string(tag)));
    };
    switch (tag) {
        case ProblemTag::Ect:
            if (const auto* c = std::get_if<EctCert>(&certificate); c && std::holds_alternative<UnaryColorStream>(instance)) {
                return EctSolution{c->stabilization_index};
            }
            return mismatch("expected an ECT certificate");
        case ProblemTag::Tcn:
            if (const auto* c = std::get_if<TcnCert>(&certificate);
                c && std::holds_alternative<std::vector<EnumerationStream>>(instance)) {
                TcnSolution s;
                for (const auto& w : c->withheld) s.values.push_back(w.empty() ? 0 : *std::min_element(w.begin(), w.end()));
                return s;
            }
            return mismatch("expected a TC_N certificate");
        case ProblemTag::WopOmega:
        case ProblemTag::WopLex:
            if (const auto* c = std::get_if<WopCert>(&certificate);
                c && (std::holds_alternative<OmegaSequence>(instance) || std::holds_alternative<LexSequence>(instance))) {
                return c->witness;
            }
            return mismatch("expected a WOP certificate");
        case ProblemTag::Ort:
            if (const auto* c = std::get_if<OrtCert>(&certificate); c && std::holds_alternative<OrtInstance>(instance)) {
                return c->homogeneous;
            }
            return mismatch("expected an ORT certificate");
    }
    return mismatch("unknown tag");
}

OrtPipelineCert transport_ort_certificate(const EctWopImage& image, const StaircaseSchedule& schedule,
                                          std::size_t horizon) {
    const OrtStageEngine& eng = *image.engine;
    const std::size_t n = eng.n();
    const std::size_t period = schedule.period;
    const std::size_t threshold = schedule.threshold;
    // Past start, every k < threshold shows its final color and every residue
    // class shows its saturated color somewhere in a long enough window.
    const std::size_t start = threshold + std::max(schedule.max_prefix_step, 2 * period) + 1;
    const auto cap = static_cast<std::int64_t>(2 * period + 1);

    std::map<std::vector<std::int64_t>, std::size_t> seen;
    std::size_t i1 = 0, i2 = 0;
    for (std::size_t i = start;; ++i) {
        if (i >= horizon) throw Error(ErrorCode::StageBudgetExceeded, "improvement pattern did not cycle");
        std::vector<std::int64_t> key{static_cast<std::int64_t>(i % period)};
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t prev = eng.previous(j, i);
            key.push_back(prev < threshold ? -1 - static_cast<std::int64_t>(prev)
                                           : std::min(static_cast<std::int64_t>(i - prev), cap));
        }
        auto [it, fresh] = seen.emplace(std::move(key), i);
        if (!fresh) {
            i1 = it->second;
            i2 = i;
            break;
        }
    }

    OrtPipelineCert cert;
    cert.cycle_start = i1;
    cert.cycle_length = i2 - i1;
    cert.infinitely_often.assign(n, false);
    cert.last_improvement.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        bool zero_in_cycle = false;
        std::optional<std::size_t> last_zero;
        for (std::size_t i = 0; i < i2; ++i) {
            const bool imp = eng.improvement(j, i);
            if (imp) cert.last_improvement[j - 1] = i;
            if (!imp && i < i1) last_zero = i;
            if (i >= i1) {
                if (imp) cert.infinitely_often[j - 1] = true;
                if (!imp) zero_in_cycle = true;
            }
        }
        EctCert ec;
        std::uint64_t bound = 0;
        if (!cert.infinitely_often[j - 1]) {
            bound = cert.last_improvement[j - 1];
            ec.tail_palette = {0};
        } else if (zero_in_cycle) {
            ec.tail_palette = {0, 1};
        } else {
            bound = last_zero.value_or(0);
            ec.tail_palette = {1};
        }
        ec.stabilization_index = bound;
        cert.ect_bounds.push_back(bound);
        cert.ect_certs.push_back(ec);
    }

    for (std::size_t j = n; j >= 1; --j) {
        if (cert.infinitely_often[j - 1]) {
            cert.j_star = j;
            break;
        }
    }
    if (cert.j_star == 0) throw Error(ErrorCode::CertificateMismatch, "no color improves infinitely often");
    std::size_t floor = 0;
    for (std::size_t j = cert.j_star + 1; j <= n; ++j) floor = std::max(floor, cert.last_improvement[j - 1]);
    for (std::size_t i = floor;; ++i) {
        if (eng.improvement(cert.j_star, i)) {
            cert.i_star = i;
            break;
        }
    }
    cert.color = eng.extension()[cert.j_star - 1];
    return cert;
}

Stream<Drawn> certified_sigma_solution(const EctWopImage& image, const OrtPipelineCert& cert) {
    auto engine = image.engine;
    const std::size_t n = engine->n();
    const LinearOrder& x = *engine->order();
    std::vector<Drawn> prefix;
    for (std::size_t i = 0; i <= cert.i_star; ++i) {
        for (std::size_t j = n; j > cert.j_star; --j) {
            const Element& e = engine->entry(j, i);
            if (prefix.empty() || x.less(e, prefix.back().value)) prefix.push_back({e, i});
        }
    }
    const auto params = ExtractionParams::from_bounds(n, cert.ect_bounds);
    if (prefix.size() > params.m + 1) {
        throw Error(ErrorCode::CertificateMismatch, "columns left of j* hold " + std::to_string(prefix.size()) +
                                                        " descending values, more than M + 1");
    }
    struct State {
        std::size_t row;
        std::optional<Element> last;
    };
    auto st = std::make_shared<State>(State{cert.i_star, std::nullopt});
    if (!prefix.empty()) st->last = prefix.back().value;
    const std::size_t j_star = cert.j_star;
    return Stream<Drawn>::from_function([engine, prefix, st, j_star](std::size_t t) -> Drawn {
        if (t < prefix.size()) return prefix[t];
        const LinearOrder& x = *engine->order();
        for (;; ++st->row) {
            const Element& e = engine->entry(j_star, st->row);
            if (!st->last || x.less(e, *st->last)) {
                st->last = e;
                return {e, st->row++};
            }
        }
    });
}

TcnRunCert transport_tcn_certificate(const TcnLexImage& image, const TcnCert& cert) {
    const TcnStageEngine& eng = *image.engine;
    const std::size_t n = eng.n();
    if (cert.withheld.size() != n) throw Error(ErrorCode::CertificateMismatch, "withheld sets do not match the width");
    TcnRunCert rc;
    for (std::size_t m = 1; m <= n; ++m) {
        if (cert.withheld[m - 1].empty()) rc.a_y |= Subset{1} << (m - 1);
    }
    rc.y = subset_index(n, rc.a_y);
    const std::size_t budget = eng.stage_budget();
    const TcnStage& last = eng.stage(budget - 1);
    for (std::size_t m = 1; m <= n; ++m) {
        const auto& w = cert.withheld[m - 1];
        if (!w.empty() && last.guesses[m - 1] != *std::min_element(w.begin(), w.end())) {
            throw Error(ErrorCode::StageBudgetExceeded, "guess for coordinate " + std::to_string(m) +
                                                            " has not settled within the budget");
        }
    }
    for (std::size_t i = 0; i < budget; ++i) {
        if (eng.stage(i).u & ~rc.a_y) rc.i_star = static_cast<std::int64_t>(i);
    }
    if (rc.i_star >= 0) {
        for (auto i = static_cast<std::size_t>(rc.i_star); i < budget; ++i) {
            const Subset v = eng.stage(i).cycle.v;
            if ((v & rc.a_y) == rc.a_y && v != rc.a_y) {
                rc.i_double_star = static_cast<std::int64_t>(i);
                break;
            }
        }
        if (rc.i_double_star < 0) throw Error(ErrorCode::StageBudgetExceeded, "no stage past i_* covers A_y");
    }
    for (auto i = static_cast<std::size_t>(rc.i_double_star + 1); i < budget; ++i) {
        const auto& st = eng.stage(i);
        if (st.cycle.v & ~rc.a_y) {
            throw Error(ErrorCode::CertificateMismatch, "V_" + std::to_string(i) + " leaves A_y after i_**");
        }
        if (st.cycle.j == rc.y) rc.y_stages.push_back(i);
    }
    if (rc.y_stages.empty()) throw Error(ErrorCode::StageBudgetExceeded, "column y never updated after i_**");
    return rc;
}

std::vector<Drawn> certified_tcn_solution(const TcnLexImage& image, const TcnRunCert& rc) {
    const TcnStageEngine& eng = *image.engine;
    std::vector<Drawn> x;
    const auto& row0 = eng.stage(0).row;
    if (std::any_of(row0.entries().begin(), row0.entries().end(), [](const Element& e) { return e.is_infinity(); })) {
        x.push_back({Element::infinity(), 0});
    }
    for (auto i : rc.y_stages) x.push_back({eng.stage(i).value, i});
    return x;
}

// ---- runners ------------------------------------------------------------

Report run_verify(const RunConfig& cfg) {
    const auto start = Clock::now();
    const ReductionId id = parse_reduction_id(cfg.reduction);
    if (cfg.trials == 0 || cfg.depth < 2 || cfg.stage_budget == 0) {
        throw Error(ErrorCode::ParamsOutOfRange, "trials, depth and stage budget must be positive");
    }
    TrialFn fn;
    switch (id) {
        case ReductionId::WopToOrt: fn = [&cfg](TrialContext& c) { trial_wop_to_ort(c, cfg); }; break;
        case ReductionId::OrtProduct: fn = [&cfg](TrialContext& c) { trial_ort_product(c, cfg); }; break;
        case ReductionId::OrtToEctWop: fn = [&cfg](TrialContext& c) { trial_ort_to_ectwop(c, cfg); }; break;
        case ReductionId::LexToOmega: fn = [&cfg](TrialContext& c) { trial_lex_to_omega(c, cfg); }; break;
        case ReductionId::TcnToLex: fn = [&cfg](TrialContext& c) { trial_tcn_to_lex(c, cfg); }; break;
        case ReductionId::OrtFullPipeline: fn = [&cfg](TrialContext& c) { trial_full_pipeline(c, cfg); }; break;
    }
    Report r;
    r.command = "verify";
    r.config = {{"reduction", cfg.reduction}, {"trials", cfg.trials},          {"depth", cfg.depth},
                {"seed", cfg.seed},           {"stage_budget", cfg.stage_budget}, {"mutation", to_string(cfg.mutation)}};
    r.trials = run_trials(cfg, fn);
    r.pass = std::all_of(r.trials.begin(), r.trials.end(), [](const TrialRecord& t) { return t.verdict == "pass"; });
    r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
}

Report run_lemma_vi(const RunConfig& cfg) {
    const auto start = Clock::now();
    if (cfg.n == 0 || cfg.n > 4) throw Error(ErrorCode::ParamsOutOfRange, "lemma-vi needs 1 <= n <= 4");
    if (cfg.trials == 0 || cfg.stages == 0) throw Error(ErrorCode::ParamsOutOfRange, "trials and stages must be positive");
    const std::size_t n = cfg.n;
    TrialFn fn = [&cfg, n](TrialContext& ctx) {
        Rng rng(ctx.seed);
        const Subset full = (Subset{1} << n) - 1;
        // Per-trial mix of dense, sparse and singleton updates.
        const std::uint64_t empty_weight = rng.below(4);
        const std::uint64_t single_weight = rng.below(4);
        ResetState state(n);
        for (std::size_t i = 0; i < cfg.stages; ++i) {
            Subset u;
            const auto roll = rng.below(8);
            if (roll < empty_weight) {
                u = 0;
            } else if (roll < empty_weight + single_weight) {
                u = Subset{1} << rng.below(n);
            } else {
                u = static_cast<Subset>(rng.below(full + 1));
            }
            const auto completers = brute_force_completers(state, u);
            const Subset naive = naive_cycle_set(state, u);
            const auto before = state.resets();
            const CycleStep step = state.step(u);
            const std::string at = "stage " + std::to_string(i) + " U=" + format_subset(u);
            require(completers.size() == 1, "NotUnique", at + ": " + std::to_string(completers.size()) + " completers");
            require(completers.front() == step.v, "Mismatch",
                    at + ": brute force " + format_subset(completers.front()) + " vs step " + format_subset(step.v));
            require(naive == step.v, "Mismatch", at + ": naive " + format_subset(naive));
            for (Subset a = 0; a <= full; ++a) {
                const bool reset = state.reset(a) == static_cast<std::int64_t>(i);
                const bool subset = (a & step.v) == a;
                require(reset == subset, "ResetIncoherent", at + " A=" + format_subset(a));
                if (!reset) require(state.reset(a) == before[a], "ResetIncoherent", at + " A=" + format_subset(a));
            }
        }
    };
    Report r;
    r.command = "lemma-vi";
    r.config = {{"n", cfg.n}, {"stages", cfg.stages}, {"trials", cfg.trials}, {"seed", cfg.seed}};
    r.trials = run_trials(cfg, fn);
    r.pass = std::all_of(r.trials.begin(), r.trials.end(), [](const TrialRecord& t) { return t.verdict == "pass"; });
    r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
}

Report run_adversary(const RunConfig& cfg) {
    const auto start = Clock::now();
    const Candidate& cand = find_candidate(parse_adversary(cfg.which), cfg.candidate);
    Report r;
    r.command = "adversary";
    r.config = {{"which", cfg.which}, {"candidate", cfg.candidate}, {"fuel", cfg.fuel}};
    TrialRecord t;
    try {
        Verdict v = run_duel(cand, cfg.fuel);
        t.verdict = std::string(to_string(v.kind));
        t.detail = v.reason;
        r.transcript = std::move(v.transcript);
        r.pass = v.kind == VerdictKind::RefutationFound;
        if (v.refutation) {
            std::string why;
            const bool checked = check_refutation(cand, *v.refutation, &why);
            nlohmann::json input = nlohmann::json::array();
            for (const auto& tape : v.refutation->k_input) {
                auto tj = nlohmann::json::array();
                for (const auto& e : tape) tj.push_back(format(e));
                input.push_back(std::move(tj));
            }
            auto committed = nlohmann::json::array();
            for (const auto& e : v.refutation->committed) committed.push_back(format(e));
            t.fixture = {{"contract", v.refutation->contract},
                         {"k_input", std::move(input)},
                         {"committed", std::move(committed)},
                         {"evidence", v.refutation->evidence},
                         {"checked", checked}};
            if (!checked) {
                r.pass = false;
                t.detail += "; checker rejected: " + why;
            }
        }
        r.config["fuel_used"] = v.fuel_used;
    } catch (const Error& e) {
        t.verdict = std::string(to_string(e.code()));
        t.detail = e.what();
        r.pass = false;
    }
    r.trials.push_back(std::move(t));
    r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
}

std::vector<OmegaTerm> enumerate_terms(std::uint64_t alpha, std::size_t max_pairs, std::uint64_t max_exp) {
    if (alpha < 2 || max_exp > 16) throw Error(ErrorCode::ParamsOutOfRange, "need alpha >= 2 and max_exp <= 16");
    const auto x = make_order(LinearOrder::finite_chain(alpha));
    std::vector<OmegaTerm> out;
    std::vector<OmegaPair> cur;
    // Exponents strictly decrease; coefficients skip the bottom 0.
    std::function<void(std::uint64_t)> rec = [&](std::uint64_t below) {
        out.emplace_back(x, cur);
        if (cur.size() == max_pairs) return;
        for (std::uint64_t e = 0; e < below; ++e) {
            for (std::uint64_t a = 1; a < alpha; ++a) {
                cur.push_back({e, Element::integer(static_cast<std::int64_t>(a))});
                rec(e);
                cur.pop_back();
            }
        }
    };
    rec(max_exp);
    return out;
}

Report run_oracle_cnf(const RunConfig& cfg) {
    const auto start = Clock::now();
    const auto terms = enumerate_terms(cfg.alpha, cfg.max_pairs, cfg.max_exp);
    const LinearOrder x = LinearOrder::finite_chain(cfg.alpha);
    Report r;
    r.command = "oracle-cnf";
    r.config = {{"alpha", cfg.alpha}, {"max_pairs", cfg.max_pairs}, {"max_exp", cfg.max_exp}};
    TrialRecord t{0, "pass", "", nullptr};
    std::size_t pairs = 0;
    for (const auto& s : terms) {
        for (const auto& u : terms) {
            ++pairs;
            const auto a = cmp_omega_power(x, s, u);
            const auto b = cmp_via_cnf_oracle(cfg.alpha, s, u);
            if (a != b && t.verdict == "pass") {
                t.verdict = "Mismatch";
                t.detail = format(s) + " vs " + format(u) + ": " + std::string(to_string(a)) + " but oracle says " +
                           std::string(to_string(b));
            }
        }
    }
    if (t.verdict == "pass") t.detail = std::to_string(terms.size()) + " terms, " + std::to_string(pairs) + " ordered pairs agree";
    r.pass = t.verdict == "pass";
    r.trials.push_back(std::move(t));
    r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
}

}  // namespace wopbench
