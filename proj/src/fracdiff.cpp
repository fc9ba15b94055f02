#include "fdlab/fracdiff.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <mutex>

namespace fdlab::fracdiff {

namespace {

constexpr long kSpotIndices[] = {0, 1, 2, 3, 7, 15, 31, 63, 127, 255, 511, 1023};

inline void two_sum(double& s, double& c, double p) {
    double t = s + p;
    if (std::fabs(s) >= std::fabs(p))
        c += (s - t) + p;
    else
        c += (p - t) + s;
    s = t;
}

bool near_integer(double x, double eps = 1e-12) {
    return std::fabs(x - std::nearbyint(x)) < eps;
}

} // namespace

RealSequence::RealSequence(std::function<double(long)> eval, GrowthBound growth,
                           std::optional<long> support_end, bool spot_check)
    : eval_(std::move(eval)), growth_(growth), support_end_(support_end) {
    if (growth_.constant < 0.0)
        throw DomainError("RealSequence: negative growth constant");
    if (spot_check && growth_.constant > 0.0) {
        for (long n : kSpotIndices) {
            if (support_end_ && n > *support_end_) break;
            double v = eval_(n);
            double bound = growth_.constant * std::pow(n + 1.0, growth_.exponent);
            if (std::fabs(v) > bound * (1.0 + 1e-12) + 1e-300)
                throw GrowthViolationError("RealSequence: declared growth violated at n=" +
                                           std::to_string(n));
        }
    }
    if (spot_check && growth_.constant == 0.0 && !support_end_) {
        for (long n : kSpotIndices)
            if (eval_(n) != 0.0)
                throw GrowthViolationError("RealSequence: zero declaration violated");
    }
}

RealSequence RealSequence::constant(double c) {
    return RealSequence([c](long) { return c; }, {std::fabs(c), 0.0});
}

RealSequence RealSequence::geometric(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw DomainError("RealSequence::geometric: rho in [0,1] required");
    RealSequence seq([rho](long n) { return std::pow(rho, static_cast<double>(n)); },
                     {1.0, 0.0});
    if (rho < 1.0) seq.declare_decay({1.0, rho});
    return seq;
}

RealSequence& RealSequence::declare_decay(DecayBound d) {
    if (!(d.ratio >= 0.0 && d.ratio < 1.0) || !(d.constant >= 0.0))
        throw DomainError("declare_decay: need 0 <= ratio < 1 and constant >= 0");
    for (long n : kSpotIndices) {
        if (support_end_ && n > *support_end_) break;
        double bound = d.constant * std::pow(d.ratio, static_cast<double>(n));
        if (std::fabs(eval_(n)) > bound * (1.0 + 1e-12) + 1e-300)
            throw GrowthViolationError("declare_decay: bound violated at n=" + std::to_string(n));
    }
    decay_ = d;
    return *this;
}

RealSequence RealSequence::polynomial(std::vector<double> coeffs) {
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    double csum = 0.0;
    for (double c : coeffs) csum += std::fabs(c);
    double deg = static_cast<double>(coeffs.size() - 1);
    auto eval = [coeffs](long n) {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * n + coeffs[i];
        return acc;
    };
    return RealSequence(std::move(eval), {csum, deg});
}

RealSequence RealSequence::from_values(std::vector<double> values) {
    double mx = 0.0;
    for (double v : values) mx = std::max(mx, std::fabs(v));
    long end = static_cast<long>(values.size()) - 1;
    auto vals = std::make_shared<std::vector<double>>(std::move(values));
    return RealSequence(
        [vals](long n) {
            return (n >= 0 && n < static_cast<long>(vals->size())) ? (*vals)[n] : 0.0;
        },
        {mx, 0.0}, end);
}

RealSequence RealSequence::zero() {
    return RealSequence([](long) { return 0.0; }, {0.0, 0.0}, -1);
}

const char* to_string(Method m) {
    switch (m) {
        case Method::direct: return "direct";
        case Method::abel: return "abel";
        case Method::cesaro: return "cesaro";
    }
    return "?";
}

const char* to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::summable: return "summable";
        case Status::failed: return "failed";
    }
    return "?";
}

double binomial(long n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
    return v;
}

namespace {

// Fitted constant C with |k^{-a}(j)| <= C j^{-a-1} past the fit head.
double coeff_tail_constant(double a) {
    auto fitted = cesaro::sequence({-a, 4096});
    return fitted.tail()->constant;
}

struct DirectSum {
    double value;
    long terms;
    double tail;
};

// Certified tail of sum_{j>N} |k^{-a}(j)| C (j+n+1)^p, valid for p < a.
double tail_bound(double ck, double c_growth, double p, double a, long n, long N) {
    if (c_growth == 0.0) return 0.0;
    double f = p > 0.0 ? std::pow(1.0 + (n + 1.0) / static_cast<double>(N), p) : 1.0;
    return ck * c_growth * f * std::pow(static_cast<double>(N), p - a) / (a - p);
}

// Certified tail under a geometric decay certificate |Lambda_j| <= C rho^j:
// sum_{j>N} ck j^q rho^{j+n} with q = -a-1.
double tail_bound_decay(double ck, const DecayBound& d, double a, long n, long N) {
    if (d.constant == 0.0) return 0.0;
    const double q = -a - 1.0;
    const double rho = d.ratio;
    if (rho == 0.0) return 0.0;
    double offset = std::pow(rho, static_cast<double>(n));
    double sum;
    if (q <= 0.0) {
        sum = std::pow(N + 1.0, q) * std::pow(rho, N + 1.0) / (1.0 - rho);
    } else {
        // split rho^j = rho^{j/2} rho^{j/2}; sup_x x^q rho^{x/2} is closed form
        double xstar = std::max(1.0, -2.0 * q / std::log(rho));
        double sup = std::pow(xstar, q) * std::pow(rho, xstar / 2.0);
        sum = sup * std::pow(rho, (N + 1.0) / 2.0) / (1.0 - std::sqrt(rho));
    }
    return ck * d.constant * offset * sum;
}

constexpr long kBlock = 8192;

// Exact finite evaluation for sequences with certified support end.
DirectSum sum_finite(double a, const RealSequence& seq, long n) {
    long end = *seq.support_end();
    long J = end - n; // last j with Lambda_{j+n} possibly nonzero
    if (J < 0) return {0.0, 0, 0.0};
    std::vector<double> coeff(static_cast<std::size_t>(J) + 1);
    std::vector<double> vals(static_cast<std::size_t>(J) + 1);
    double k = 1.0;
    for (long j = 0; j <= J; ++j) {
        coeff[j] = k;
        k *= (j - a) / (j + 1.0); // recurrence for k^{-a}
        vals[j] = seq(j + n);
    }
    return {kernels::dot_compensated(coeff, vals), J + 1, 0.0};
}

DirectSum sum_direct(double a, const RealSequence& seq, long n, double tol, long budget) {
    if (seq.support_end()) return sum_finite(a, seq, n);
    const double p = seq.growth().exponent;
    const double cg = seq.growth().constant;
    if (cg == 0.0) return {0.0, 0, 0.0};
    if (a > 0.0 && std::fabs(a - std::nearbyint(a)) < 1e-12) {
        // positive integer order: k^{-a}(j) = 0 beyond j = a, exact binomial sum
        long A = std::llround(a);
        std::vector<double> coeff(static_cast<std::size_t>(A) + 1);
        std::vector<double> vals(static_cast<std::size_t>(A) + 1);
        double k = 1.0;
        for (long j = 0; j <= A; ++j) {
            coeff[j] = k;
            k *= (j - a) / (j + 1.0);
            vals[j] = seq(j + n);
        }
        return {kernels::dot_compensated(coeff, vals), A + 1, 0.0};
    }
    if (!(p < a) && !seq.decay())
        throw DivergenceError("frac_diff: growth exponent " + std::to_string(p) +
                              " not below order " + std::to_string(a));
    const double ck = coeff_tail_constant(a);
    auto rest = [&](long N) {
        double tb = p < a ? tail_bound(ck, cg, p, a, n, N)
                          : std::numeric_limits<double>::infinity();
        if (seq.decay()) tb = std::min(tb, tail_bound_decay(ck, *seq.decay(), a, n, N));
        return tb;
    };
    double s = 0.0, comp = 0.0;
    double kcur = 1.0; // k^{-a}(j) running value
    std::vector<double> coeff(kBlock), vals(kBlock);
    long j = 0;
    while (j < budget) {
        long bl = std::min<long>(kBlock, budget - j);
        for (long i = 0; i < bl; ++i) {
            coeff[i] = kcur;
            kcur *= (j + i - a) / (j + i + 1.0);
            vals[i] = seq(j + i + n);
        }
        two_sum(s, comp,
                kernels::dot_compensated({coeff.data(), static_cast<std::size_t>(bl)},
                                         {vals.data(), static_cast<std::size_t>(bl)}));
        j += bl;
        if (j >= 1024) {
            double tb = rest(j);
            if (tb < tol) return {s + comp, j, tb};
        }
    }
    throw ToleranceError("frac_diff: certified tail still " + std::to_string(rest(j)) +
                         " after " + std::to_string(j) + " terms");
}

// Partial sums of the series terms as a sequence, for the summability paths.
RealSequence partial_sums_of(double a, const RealSequence& seq, long n) {
    auto state = std::make_shared<std::pair<std::vector<double>, double>>();
    state->second = 1.0; // next k^{-a}
    // spot checks disabled: no tight growth declaration for partial sums
    auto eval = [state, a, seq, n](long N) {
        auto& [sums, knext] = *state;
        while (static_cast<long>(sums.size()) <= N) {
            long j = static_cast<long>(sums.size());
            double prev = j == 0 ? 0.0 : sums.back();
            sums.push_back(prev + knext * seq(j + n));
            knext *= (j - a) / (j + 1.0);
        }
        return sums[N];
    };
    return RealSequence(eval, {0.0, 0.0}, std::nullopt, false);
}

} // namespace

ConvergenceReport frac_diff(double a, const RealSequence& seq, long n, const EvalOptions& opts) {
    if (n < 0) throw DomainError("frac_diff: negative index");
    if (!(opts.tol > 0.0)) throw DomainError("frac_diff: tolerance must be positive");
    ConvergenceReport rep;
    if (a == 0.0) { // (1-nabla)^0 is the identity
        rep.value = seq(n);
        rep.method = Method::direct;
        rep.terms_used = 1;
        rep.status = Status::converged;
        return rep;
    }
    if (opts.cesaro_order) {
        double tau = *opts.cesaro_order;
        auto sums = partial_sums_of(a, seq, n);
        ConvergenceReport lim = summable_limit(tau, sums, opts);
        lim.method = Method::cesaro;
        lim.cesaro_order = tau;
        lim.status = Status::summable;
        return lim;
    }
    const bool direct_ok = seq.support_end() || seq.growth().constant == 0.0 ||
                           seq.growth().exponent < a || seq.decay().has_value() ||
                           (a > 0.0 && std::fabs(a - std::nearbyint(a)) < 1e-12);
    if (direct_ok) {
        DirectSum ds = sum_direct(a, seq, n, opts.tol, opts.budget);
        rep.value = ds.value;
        rep.method = Method::direct;
        rep.terms_used = ds.terms;
        rep.tail_bound = ds.tail;
        rep.status = Status::converged;
        return rep;
    }
    if (opts.allow_abel) {
        // Abel regularization: S(r) for r climbing to 1, stabilized ladder.
        double prev = 0.0;
        long used = 0;
        for (int i = 2; i <= 40; ++i) {
            double r = 1.0 - std::pow(2.0, -i);
            double s = 0.0, comp = 0.0, kcur = 1.0, rp = 1.0;
            long terms = std::min<long>(opts.budget, 1L << std::min(i + 12, 24));
            for (long j = 0; j < terms; ++j) {
                two_sum(s, comp, kcur * rp * seq(j + n));
                kcur *= (j - a) / (j + 1.0);
                rp *= r;
            }
            double val = s + comp;
            used += terms;
            if (i > 2 && std::fabs(val - prev) < opts.tol) {
                rep.value = val;
                rep.method = Method::abel;
                rep.terms_used = used;
                rep.tail_bound = std::fabs(val - prev);
                rep.status = Status::summable;
                return rep;
            }
            prev = val;
        }
        throw ToleranceError("frac_diff: Abel ladder did not stabilize");
    }
    throw DivergenceError("frac_diff: growth exponent " +
                          std::to_string(seq.growth().exponent) + " >= order " +
                          std::to_string(a) + " and no summability method requested");
}

ConvergenceReport frac_diff_reduced(double a, const RealSequence& seq, long n,
                                    const EvalOptions& opts) {
    if (a <= 0.0) return frac_diff(a, seq, n, opts);
    const long A = static_cast<long>(std::ceil(a - 1e-12));
    // Inner integer-order difference, an exact finite sum of A+1 terms.
    std::vector<double> w(static_cast<std::size_t>(A) + 1);
    for (long i = 0; i <= A; ++i) w[i] = ((i % 2) ? -1.0 : 1.0) * binomial(A, static_cast<int>(i));
    auto inner = [A, w, &seq](long j) {
        double s = 0.0, c = 0.0;
        for (long i = 0; i <= A; ++i) two_sum(s, c, w[i] * seq(j + i));
        return s + c;
    };
    if (near_integer(a) && std::llround(a) == A) {
        ConvergenceReport rep;
        rep.value = inner(n);
        rep.method = Method::direct;
        rep.terms_used = A + 1;
        rep.status = Status::converged;
        return rep;
    }
    // Certified-null inner: every probe vanishes within the roundoff of the
    // exact finite sums. Then the outer fractional difference is exactly 0.
    double scale = 0.0;
    long probe_end = seq.support_end() ? *seq.support_end() : n + 4 * A + 64;
    for (long j = n; j <= probe_end; ++j) scale = std::max(scale, std::fabs(seq(j)));
    double thresh = 64.0 * std::pow(2.0, static_cast<double>(A)) *
                    std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
    bool null_inner = true;
    for (long j = n; j <= probe_end - A && null_inner; ++j)
        if (std::fabs(inner(j)) > thresh) null_inner = false;
    if (null_inner && !seq.support_end()) {
        // unbounded support: re-verify on a sparse far sample
        for (long j : {probe_end, 2 * probe_end, 4 * probe_end})
            if (std::fabs(inner(j)) > thresh) null_inner = false;
    }
    if (null_inner) {
        ConvergenceReport rep;
        rep.value = 0.0;
        rep.method = Method::direct;
        rep.terms_used = (probe_end - n + 1) * (A + 1);
        rep.tail_bound = thresh; // certified-null threshold of the inner sums
        rep.status = Status::converged;
        return rep;
    }
    return frac_diff(a, seq, n, opts);
}

double cesaro_mean(double tau, const RealSequence& partials, long n) {
    if (tau < 0.0) throw DomainError("cesaro_mean: tau >= 0 required");
    if (n < 0) throw DomainError("cesaro_mean: negative index");
    if (tau == 0.0) return partials(n);
    std::vector<double> w(static_cast<std::size_t>(n) + 1), s(static_cast<std::size_t>(n) + 1);
    double k = 1.0;
    for (long i = 0; i <= n; ++i) {
        w[n - i] = k; // k^tau(i) placed so w[j] = k^tau(n-j)
        k *= (i + tau) / (i + 1.0);
        s[i] = partials(i);
    }
    double norm = 1.0; // k^{tau+1}(n)
    for (long i = 1; i <= n; ++i) norm *= (i + tau) / i;
    return kernels::dot_compensated(w, s) / norm;
}

namespace {

ConvergenceReport window_result(double tau, double mean, long terms, double span, double tol) {
    ConvergenceReport rep;
    rep.value = mean;
    rep.method = tau == 0.0 ? Method::direct : Method::cesaro;
    rep.cesaro_order = tau;
    rep.terms_used = terms;
    rep.tail_bound = span;
    rep.status = (tau == 0.0 && span <= tol) ? Status::converged : Status::summable;
    return rep;
}

} // namespace

ConvergenceReport summable_limit(double tau, const RealSequence& partials,
                                 const EvalOptions& opts) {
    if (tau < 0.0) throw DomainError("summable_limit: tau >= 0 required");
    const bool integral = near_integer(tau);
    long budget = opts.budget;
    long window = std::max<long>(50, budget / 20);
    if (!integral) {
        budget = std::min<long>(budget, 20000);
        window = std::min<long>(std::max<long>(50, budget / 20), 1000);
    }
    // Sliding min/max over the trailing window of means.
    std::deque<std::pair<long, double>> lo, hi;
    auto push = [&](long idx, double m) {
        while (!lo.empty() && lo.back().second >= m) lo.pop_back();
        lo.emplace_back(idx, m);
        while (!hi.empty() && hi.back().second <= m) hi.pop_back();
        hi.emplace_back(idx, m);
        while (lo.front().first <= idx - window) lo.pop_front();
        while (hi.front().first <= idx - window) hi.pop_front();
    };

    if (integral) {
        int t = static_cast<int>(std::llround(tau));
        std::vector<double> chain(static_cast<std::size_t>(t) + 1, 0.0);
        double norm = 1.0; // k^{tau+1}(n)
        for (long nIdx = 0; nIdx < budget; ++nIdx) {
            double v = partials(nIdx);
            for (int k = 1; k <= t; ++k) {
                chain[k] += v;
                v = chain[k];
            }
            if (nIdx > 0) norm *= (nIdx + tau) / static_cast<double>(nIdx);
            double mean = v / norm;
            push(nIdx, mean);
            if (nIdx + 1 >= window) {
                double span = hi.front().second - lo.front().second;
                if (span < opts.tol) return window_result(tau, mean, nIdx + 1, span, opts.tol);
            }
        }
    } else {
        for (long nIdx = 0; nIdx < budget; ++nIdx) {
            double mean = cesaro_mean(tau, partials, nIdx);
            push(nIdx, mean);
            if (nIdx + 1 >= window) {
                double span = hi.front().second - lo.front().second;
                if (span < opts.tol) return window_result(tau, mean, nIdx + 1, span, opts.tol);
            }
        }
    }
    throw ToleranceError("summable_limit: means did not stabilize within budget");
}

TaylorSplit discrete_taylor(const RealSequence& seq, int k, long n) {
    if (k < 1 || n < k) throw PreconditionError("discrete_taylor: need n >= k >= 1");
    std::vector<double> row(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) row[i] = seq(i);
    std::vector<double> head_terms(static_cast<std::size_t>(k));
    // (I-nabla)^j Lambda_0 read off a forward difference table.
    std::vector<double> diff = row;
    for (int j = 0; j < k; ++j) {
        head_terms[j] = ((j % 2) ? -1.0 : 1.0) * binomial(n, j) * diff[0];
        for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] -= diff[i + 1];
        diff.pop_back();
    }
    // diff now holds (I-nabla)^k Lambda_j for j = 0..n-k.
    std::vector<double> tail_terms(static_cast<std::size_t>(n - k) + 1);
    for (long j = 0; j <= n - k; ++j)
        tail_terms[j] = binomial(n - 1 - j, k - 1) * diff[j];
    double head = kernels::sum_compensated(head_terms);
    double tail = ((k % 2) ? -1.0 : 1.0) * kernels::sum_compensated(tail_terms);
    return {head, tail};
}

namespace {

// Memoized wrapper so inner differences are evaluated once per index.
std::function<double(long)> memoized(std::function<double(long)> f) {
    struct State {
        std::mutex mu;
        std::vector<std::pair<bool, double>> cache;
        std::function<double(long)> f;
    };
    auto st = std::make_shared<State>();
    st->f = std::move(f);
    return [st](long n) {
        {
            std::lock_guard<std::mutex> lock(st->mu);
            if (n >= 0 && n < static_cast<long>(st->cache.size()) && st->cache[n].first)
                return st->cache[n].second;
        }
        double v = st->f(n);
        std::lock_guard<std::mutex> lock(st->mu);
        if (n >= 0) {
            if (n >= static_cast<long>(st->cache.size()))
                st->cache.resize(static_cast<std::size_t>(n) + 1, {false, 0.0});
            st->cache[n] = {true, v};
        }
        return v;
    };
}

// sum_i |k^{-s}(i)| (i+1)^p, finite when p < s; used to bound inner
// differences: |(1-nabla)^s Lambda_j| <= C_Lambda * S * (j+1)^p for p >= 0.
double abs_coeff_moment(double s, double p) {
    if (!(p < s)) throw DivergenceError("kuttner: inner difference not well defined (p >= s)");
    double acc = 0.0, kcur = 1.0;
    const long head = 8192;
    for (long i = 0; i < head; ++i) {
        acc += std::fabs(kcur) * std::pow(i + 1.0, p);
        kcur *= (i - s) / (i + 1.0);
    }
    double ck = coeff_tail_constant(s);
    acc += ck * std::pow(static_cast<double>(head), p - s) / (s - p);
    return acc;
}

// sum_i |k^{-s}(i)| rho^i, always finite for rho < 1; the geometric decay of
// the input survives the inner difference with this constant.
double abs_coeff_geo_moment(double s, double rho) {
    double acc = 0.0, kcur = 1.0, rp = 1.0;
    for (long i = 0; i < 1 << 16; ++i) {
        double t = std::fabs(kcur) * rp;
        acc += t;
        if (i > 64 && t < 1e-18 * acc) break;
        kcur *= (i - s) / (i + 1.0);
        rp *= rho;
    }
    return acc;
}

} // namespace

ComposeReport kuttner_compose_check(double r, double s, const RealSequence& seq, long n,
                                    const EvalOptions& opts) {
    ComposeReport rep;
    if (s > -1.0 && r >= 0.0) {
        rep.branch = 'A';
    } else if (s > -1.0 && r + s > -1.0 && !near_integer(r + s, 1e-9)) {
        rep.branch = 'B';
    } else {
        throw PreconditionError("kuttner_compose_check: hypotheses of neither theorem hold");
    }

    EvalOptions inner_opts = opts;
    inner_opts.tol = opts.tol / 4.0;

    ConvergenceReport lhs;
    try {
        lhs = frac_diff(r + s, seq, n, opts);
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string("kuttner lhs: ") + e.what());
    }

    // Materialize the inner difference with a certified growth declaration:
    // |M_j| <= C_Lambda * S(s,p) * (j+1)^p (the support-end case is exact).
    ConvergenceReport rhs;
    try {
        double p = std::max(seq.growth().exponent, 0.0);
        auto inner_eval = memoized(
            [s, &seq, inner_opts](long j) { return frac_diff(s, seq, j, inner_opts).value; });
        GrowthBound g{0.0, 0.0};
        std::optional<long> support;
        if (seq.support_end()) {
            support = *seq.support_end(); // finite input keeps finite support
            double mx = 0.0;
            for (long j = 0; j <= *support; ++j) mx = std::max(mx, std::fabs(inner_eval(j)));
            g = {mx, 0.0};
        } else if (seq.decay()) {
            // geometric decay survives the inner difference
            g = {seq.decay()->constant * abs_coeff_geo_moment(s, seq.decay()->ratio), 0.0};
        } else {
            g = {seq.growth().constant * abs_coeff_moment(s, p), p};
        }
        // Snap a certified-null inner sequence to exact zero so that negative
        // outer orders stay well defined.
        bool null_inner = true;
        for (long j = 0; j <= n + 64 && null_inner; ++j)
            if (std::fabs(inner_eval(j)) > 8.0 * inner_opts.tol) null_inner = false;
        RealSequence inner_seq =
            null_inner ? RealSequence::zero()
                       : RealSequence(inner_eval, g, support, false);
        if (!null_inner && seq.decay())
            inner_seq.declare_decay({seq.decay()->constant *
                                         abs_coeff_geo_moment(s, seq.decay()->ratio),
                                     seq.decay()->ratio});
        rhs = frac_diff(r, inner_seq, n, opts);
        if (null_inner) rep.note = "inner difference certified null";
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string("kuttner rhs: ") + e.what());
    }

    rep.lhs = lhs.value;
    rep.rhs = rhs.value;
    rep.deviation = std::fabs(lhs.value - rhs.value);
    // The inner materialization error can be amplified by the l1 mass of the
    // outer coefficients; fold it into the allowance.
    double outer_l1 = cesaro::sequence({-r, 2048}).l1();
    rep.allowance = lhs.tail_bound + rhs.tail_bound + inner_opts.tol * outer_l1 + 10.0 * opts.tol;
    rep.agree = rep.deviation <= rep.allowance;
    return rep;
}

QuestionAReport question_a_check(double a, double b, const RealSequence& seq, long horizon,
                                 const EvalOptions& opts) {
    if (!(0.0 < b && b < a)) throw PreconditionError("question_a_check: need 0 < b < a");
    if (near_integer(b, 1e-9)) throw PreconditionError("question_a_check: b must be non-integer");
    QuestionAReport rep;
    rep.hypothesis_ok = true;
    for (long n = 0; n <= horizon; ++n) {
        ConvergenceReport v = frac_diff(a, seq, n, opts);
        if (v.value < -(opts.tol + v.tail_bound)) {
            rep.hypothesis_ok = false;
            rep.hypothesis_witness = n;
            break;
        }
    }
    rep.min_value = std::numeric_limits<double>::infinity();
    for (long n = 0; n <= horizon; ++n) {
        ConvergenceReport v = frac_diff(b, seq, n, opts);
        if (v.value < rep.min_value) {
            rep.min_value = v.value;
            rep.min_index = n;
        }
    }
    rep.conclusion_ok = rep.min_value >= -(opts.tol * 10.0);
    return rep;
}

PolyFit poly_solution_check(const RealSequence& seq, int m, long horizon, double tol) {
    if (m < 0) throw DomainError("poly_solution_check: m >= 0 required");
    if (horizon < m + 2) throw PreconditionError("poly_solution_check: horizon >= m+2 required");
    PolyFit fit;
    // Newton forward differences Delta^i Lambda_0 through Lambda_0..Lambda_m.
    std::vector<double> diff(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) diff[i] = seq(i);
    fit.newton_coeffs.resize(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        fit.newton_coeffs[i] = diff[0];
        for (std::size_t j = 0; j + 1 < diff.size(); ++j) diff[j] = diff[j + 1] - diff[j];
        if (!diff.empty()) diff.pop_back();
    }
    double scale = 1.0;
    for (long n = 0; n <= horizon; ++n) scale = std::max(scale, std::fabs(seq(n)));
    for (long n = 0; n <= horizon; ++n) {
        double p = 0.0, c = 0.0;
        for (int i = 0; i <= m; ++i) two_sum(p, c, fit.newton_coeffs[i] * binomial(n, i));
        fit.max_residual = std::max(fit.max_residual, std::fabs(seq(n) - (p + c)));
    }
    fit.is_poly = fit.max_residual <= tol * scale;
    return fit;
}

} // namespace fdlab::fracdiff
