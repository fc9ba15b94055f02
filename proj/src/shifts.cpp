#include "fdlab/shifts.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fdlab::shifts {

namespace {

void check_spec(const ShiftSpec& shift) {
    if (!(shift.weight > 0.0)) throw DomainError("ShiftSpec: weight s > 0 required");
}

bool near_integer(double x, double eps = 1e-9) {
    return std::fabs(x - std::nearbyint(x)) < eps;
}

// k^s(m+n)/k^s(m) as a product of n factors (i+s)/(i+1), i = m..m+n-1.
double k_ratio_up(double s, long m, long n) {
    double v = 1.0;
    for (long i = m; i < m + n; ++i) v *= (i + s) / (i + 1.0);
    return v;
}

} // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::nonneg: return "nonneg";
        case Verdict::nonpos: return "nonpos";
        case Verdict::zero: return "zero";
        case Verdict::indefinite: return "indefinite";
        case Verdict::not_in_class: return "not_in_class";
    }
    return "?";
}

double power_norm_sq(const ShiftSpec& shift, long n, long m) {
    check_spec(shift);
    if (n < 0 || m < 0) throw DomainError("power_norm_sq: negative index");
    if (shift.direction == Direction::forward) return k_ratio_up(shift.weight, m, n);
    if (m < n) return 0.0;
    return 1.0 / k_ratio_up(shift.weight, m - n, n);
}

double operator_norm_sq_estimate(const ShiftSpec& shift, long n, long m_cap) {
    check_spec(shift);
    if (n < 0) throw DomainError("operator_norm_sq_estimate: negative power");
    if (n == 0) return 1.0;
    const double s = shift.weight;
    if (shift.direction == Direction::forward) {
        // ratio decreasing in m for s > 1, increasing for s < 1
        return s >= 1.0 ? power_norm_sq(shift, n, 0) : power_norm_sq(shift, n, m_cap);
    }
    if (n > m_cap) return 0.0;
    return s <= 1.0 ? power_norm_sq(shift, n, n) : power_norm_sq(shift, n, m_cap);
}

double frac_diff_cesaro_closed(double a, double s, long m) {
    if (!(s > 0.0)) throw DomainError("frac_diff_cesaro_closed: s > 0 required");
    if (!(a > 0.0)) throw DomainError("frac_diff_cesaro_closed: a > 0 required");
    if (!(s < a + 1.0)) throw DomainError("frac_diff_cesaro_closed: requires s < a+1");
    if (m < 0) throw DomainError("frac_diff_cesaro_closed: negative basis index");
    double sp = cesaro::sin_pi(s);
    if (sp == 0.0) return 0.0;
    long double lg = lgammal(static_cast<long double>(1.0 - s + a)) +
                     lgammal(static_cast<long double>(s) + m) -
                     lgammal(static_cast<long double>(m) + a + 1.0L);
    return static_cast<double>(sp * expl(lg) / M_PI);
}

fracdiff::RealSequence power_norm_sequence(const ShiftSpec& shift, long basis_index) {
    check_spec(shift);
    if (basis_index < 0) throw DomainError("power_norm_sequence: negative basis index");
    const double s = shift.weight;
    const long m0 = basis_index;
    if (shift.direction == Direction::backward) {
        std::vector<double> vals(static_cast<std::size_t>(m0) + 1);
        for (long n = 0; n <= m0; ++n) vals[n] = power_norm_sq(shift, n, m0);
        return fracdiff::RealSequence::from_values(std::move(vals));
    }
    // F_s: Lambda_n = k^s(n+m0)/k^s(m0) ~ n^{s-1}; fit the constant on a head
    // window, factor 2 for the asymptotic slack beyond it.
    double fit = 0.0;
    for (long n = 0; n <= 2048; ++n) {
        double v = power_norm_sq(shift, n, m0);
        fit = std::max(fit, v * std::pow(n + 1.0, 1.0 - s));
    }
    return fracdiff::RealSequence(
        [shift, m0](long n) { return power_norm_sq(shift, n, m0); }, {2.0 * fit, s - 1.0});
}

bool membership_weak(const ShiftSpec& shift, double a) {
    check_spec(shift);
    if (!(a > 0.0)) throw DomainError("membership_weak: a > 0 required");
    const double s = shift.weight;
    const bool a_integral = near_integer(a);
    bool predicted = shift.direction == Direction::backward ? true : (s < a + 1.0 || a_integral);

    // Numeric evidence: dyadic increments of the partial sums of
    // sum_j |k^{-a}(j)| power_norm_sq(shift, j, m). Backward shifts terminate
    // (finite support) and integral orders have finitely many coefficients.
    if (shift.direction == Direction::forward && !a_integral) {
        for (long m : {0L, 5L}) {
            const long top = 1L << 15;
            double kcur = 1.0, prev_inc = 0.0, slope_num = 0.0;
            long checkpoint = 256;
            double acc = 0.0, inc = 0.0;
            int samples = 0;
            for (long j = 0; j < top; ++j) {
                double t = std::fabs(kcur) * power_norm_sq(shift, j, m);
                acc += t;
                inc += t;
                kcur *= (j - a) / (j + 1.0);
                if (j + 1 == checkpoint) {
                    if (prev_inc > 0.0 && inc > 0.0) {
                        slope_num += std::log2(inc / prev_inc);
                        ++samples;
                    }
                    prev_inc = inc;
                    inc = 0.0;
                    checkpoint *= 2;
                }
            }
            double slope = samples ? slope_num / samples : -1.0;
            // increments scale like 2^{k(s-a-1)}: negative slope = convergent
            if (predicted && slope > 0.15)
                throw InconsistencyError("membership_weak: predicate says convergent, "
                                         "partial-sum increments grow");
            if (!predicted && slope < -0.15)
                throw InconsistencyError("membership_weak: predicate says divergent, "
                                         "partial-sum increments decay");
        }
    }
    return predicted;
}

SignClassification classify(const ShiftSpec& shift, double a) {
    check_spec(shift);
    if (!(a > 0.0)) throw DomainError("classify: a > 0 required");
    const double s = shift.weight;
    SignClassification out{Verdict::indefinite, ""};

    if (shift.direction == Direction::backward) {
        if (a <= s + 1e-12) {
            out.verdict = Verdict::nonneg;
            out.detail = "a <= s";
        } else {
            out.verdict = Verdict::indefinite;
            out.detail = "a > s";
        }
        // Finite exact sums on basis vectors up to index 50.
        bool saw_neg = false;
        double tol = 1e-10;
        for (long m = 0; m <= 50; ++m) {
            auto seq = power_norm_sequence(shift, m);
            for (long n = 0; n <= m; ++n) {
                double v = fracdiff::frac_diff(a, seq, n).value;
                if (v < -tol) saw_neg = true;
                if (out.verdict == Verdict::nonneg && v < -tol)
                    throw InconsistencyError("classify: negative entry contradicts a <= s");
            }
        }
        if (out.verdict == Verdict::indefinite && !saw_neg)
            throw InconsistencyError("classify: no negative entry found for a > s");
        return out;
    }

    // Forward shift.
    const bool a_integral = near_integer(a);
    if (!a_integral && s >= a + 1.0) {
        out.verdict = Verdict::not_in_class;
        out.detail = "s >= a+1 and a non-integer";
        return out;
    }
    if (near_integer(s)) {
        if (s < a + 1.0) {
            out.verdict = Verdict::zero;
            out.detail = "s integer";
        } else {
            // integral a with s >= a+1: sign of (-1)^a k^{s-a}(m+a)
            long ai = std::llround(a);
            out.verdict = (ai % 2 == 0) ? Verdict::nonneg : Verdict::nonpos;
            out.detail = "integer order reduction";
        }
        return out;
    }
    if (s >= a + 1.0) { // a integral here
        long ai = std::llround(a);
        out.verdict = (ai % 2 == 0) ? Verdict::nonneg : Verdict::nonpos;
        out.detail = "integer order reduction";
        return out;
    }
    const bool even_interval = (static_cast<long>(std::floor(s)) % 2) == 0;
    out.verdict = even_interval ? Verdict::nonneg : Verdict::nonpos;
    out.detail = even_interval ? "s in J_even" : "s in J_odd";

    // Cross-check the closed form sign at small basis indices, and the series
    // route where it is cheap to certify.
    for (long m : {0L, 1L, 3L, 7L, 25L, 50L}) {
        double closed = frac_diff_cesaro_closed(a, s, m);
        if (out.verdict == Verdict::nonneg && closed < -1e-12)
            throw InconsistencyError("classify: closed form negative in J_even");
        if (out.verdict == Verdict::nonpos && closed > 1e-12)
            throw InconsistencyError("classify: closed form positive in J_odd");
    }
    for (long m : {0L, 3L}) {
        // The power-norm sequence is normalized by k^s(m); rescale the target.
        double target = frac_diff_cesaro_closed(a, s, m) / cesaro::number(s, m);
        if (std::fabs(target) < 1e-7) continue;
        try {
            fracdiff::EvalOptions o;
            o.tol = std::fabs(target) / 8.0;
            o.budget = 200000;
            auto seq = power_norm_sequence(shift, m);
            double numeric = fracdiff::frac_diff(a, seq, 0, o).value;
            if (numeric * target < 0.0 && std::fabs(numeric) > o.tol)
                throw InconsistencyError("classify: series sign disagrees with closed form");
        } catch (const ToleranceError&) {
            // certification too expensive at this (a, s); skip the probe
        }
    }
    return out;
}

operators::FiniteOperator truncate(const ShiftSpec& shift, int dim) {
    check_spec(shift);
    if (dim < 1) throw DomainError("truncate: dim >= 1 required");
    const double s = shift.weight;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) {
        double ratio = (i + s) / (i + 1.0); // k^s(i+1)/k^s(i)
        if (shift.direction == Direction::forward)
            m(i + 1, i) = std::sqrt(ratio);
        else
            m(i, i + 1) = std::sqrt(1.0 / ratio);
    }
    return operators::FiniteOperator(std::move(m));
}

} // namespace fdlab::shifts
