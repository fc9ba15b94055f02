#include "fdlab/operator_cert.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace fdlab::operator_cert {

namespace {

void check_hermitian(const Eigen::MatrixXcd& B) {
    double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    double dev = (B - B.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12 * scale)
        throw NotHermitianError("hereditary_apply: B deviates from Hermitian by " +
                                std::to_string(dev));
}

// Upper bound on sum_{n>N} |f_n| (n+1)^g from the stored head plus the tail
// model; throws DivergenceError when the combined exponent is not summable.
double weighted_tail_l1(const series::CoefficientSeries& f, long N, double g) {
    double acc = 0.0;
    for (std::size_t n = static_cast<std::size_t>(N) + 1; n < f.size(); ++n)
        acc += std::fabs(f.coeffs()[n]) * std::pow(n + 1.0, g);
    if (f.tail()) {
        double p = f.tail()->exponent + g;
        if (p >= -1.0)
            throw DivergenceError("hereditary_apply: series tail not summable against "
                                  "the power growth of T");
        double M = static_cast<double>(std::max<long>(N, static_cast<long>(f.size()) - 1));
        if (M < 1.0) M = 1.0;
        // (n+1)^g <= 2^{max(g,0)} n^g for n >= 1
        acc += f.tail()->constant * std::pow(2.0, std::max(g, 0.0)) *
               std::pow(M, p + 1.0) / (-p - 1.0);
    }
    return acc;
}

// Growth envelope ||T^n||^2 <= C (n+1)^g valid on the computed range, with a
// dyadic-slope estimate for g and a factor-2 safety margin.
std::pair<double, double> power_growth_envelope(const FiniteOperator& T, long N) {
    double g = 0.0;
    if (N >= 8) {
        double hi = T.power_norm(static_cast<int>(N));
        double mid = T.power_norm(static_cast<int>(N / 2));
        if (hi > 0.0 && mid > 0.0)
            g = std::max(0.0, 2.0 * std::log(hi / mid) / std::log(2.0) + 0.25);
    }
    double c = 0.0;
    for (long n = 0; n <= N; ++n) {
        double nn = T.power_norm(static_cast<int>(n));
        c = std::max(c, nn * nn / std::pow(n + 1.0, g));
    }
    return {2.0 * c, g};
}

// Contraction window: the first K with ||T^K|| < 1 (if any, up to the cap)
// together with M = max_{r<K} ||T^r||. Then ||T^{N+i}|| <= ||T^N|| M for all
// i >= 0, which turns l1 remainders of the series into certified tails.
struct ContractionWindow {
    long K = 0;
    double M = 1.0;
    double rhoK = 1.0;
};

std::optional<ContractionWindow> find_contraction_window(const FiniteOperator& T, long cap) {
    double running_max = 1.0;
    for (long k = 1; k <= cap; ++k) {
        double nk = T.power_norm(static_cast<int>(k));
        if (nk < 1.0) return ContractionWindow{k, running_max, nk};
        running_max = std::max(running_max, nk);
    }
    return std::nullopt;
}

} // namespace

const char* to_string(CertVerdict v) {
    switch (v) {
        case CertVerdict::certified_nonneg: return "certified_nonneg";
        case CertVerdict::certified_negative: return "certified_negative";
        case CertVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

HereditaryResult hereditary_apply(const series::CoefficientSeries& f, const FiniteOperator& T,
                                  const Eigen::MatrixXcd& B, double tol) {
    if (B.rows() != T.dim() || B.cols() != T.dim())
        throw DomainError("hereditary_apply: dimension mismatch");
    check_hermitian(B);
    const double bnorm = operators::operator_norm(B);
    HereditaryResult res;
    res.op = Eigen::MatrixXcd::Zero(T.dim(), T.dim());

    auto nilp = T.nilpotent_index();
    const long head = static_cast<long>(f.size()) - 1;

    if (nilp && *nilp - 1 <= head) { // exact finite sum
        for (long n = 0; n < *nilp; ++n) {
            double fn = f.coeffs()[static_cast<std::size_t>(n)];
            if (fn == 0.0) continue;
            Eigen::MatrixXcd Tn = T.power(static_cast<int>(n));
            res.op.noalias() += fn * (Tn.adjoint() * B * Tn);
            res.terms = n + 1;
        }
        res.tail_bound = 0.0;
        return res;
    }

    auto window = find_contraction_window(T, std::min<long>(head, 256));
    long checkpoint = 16;
    auto rest_bound = [&](long N) {
        double b = std::numeric_limits<double>::infinity();
        if (window) {
            double tn = T.power_norm(static_cast<int>(N) + 1);
            b = window->M * window->M * tn * tn * f.tail_l1_from(N);
        }
        if (b * bnorm > tol) {
            try {
                auto [cT, g] = power_growth_envelope(T, std::max<long>(N, 8));
                b = std::min(b, cT * weighted_tail_l1(f, N, g));
            } catch (const DivergenceError&) {
                if (!window) throw;
            }
        }
        return b * bnorm;
    };

    for (long n = 0; n <= head; ++n) {
        double fn = f.coeffs()[static_cast<std::size_t>(n)];
        if (fn != 0.0) {
            Eigen::MatrixXcd Tn = T.power(static_cast<int>(n));
            res.op.noalias() += fn * (Tn.adjoint() * B * Tn);
        }
        res.terms = n + 1;
        if (n + 1 == checkpoint || n == head) {
            res.tail_bound = rest_bound(n);
            if (res.tail_bound <= tol) return res;
            checkpoint *= 2;
        }
    }
    throw ToleranceError("hereditary_apply: certified tail " + std::to_string(res.tail_bound) +
                         " above tolerance; supply more coefficients or loosen tol");
}

HereditaryResult alpha_of_T(double a, const FiniteOperator& T, double tol) {
    if (auto q = T.nilpotent_index()) {
        auto f = cesaro::sequence({-a, static_cast<std::size_t>(*q)});
        return hereditary_apply(f, T, Eigen::MatrixXcd::Identity(T.dim(), T.dim()), tol);
    }
    for (std::size_t len = 4096; len <= (1u << 21); len *= 8) {
        try {
            auto f = cesaro::sequence({-a, len});
            return hereditary_apply(f, T, Eigen::MatrixXcd::Identity(T.dim(), T.dim()), tol);
        } catch (const ToleranceError&) {
            if (len * 8 > (1u << 21)) throw;
        }
    }
    throw ToleranceError("alpha_of_T: unreachable");
}

double at_norm(const series::CoefficientSeries& beta, const FiniteOperator& T, long n_max) {
    if (n_max < 0) throw DomainError("at_norm: n_max >= 0 required");
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(T.dim(), T.dim());
    auto nilp = T.nilpotent_index();
    long stop = std::min<long>(n_max, static_cast<long>(beta.size()) - 1);
    if (nilp) stop = std::min<long>(stop, *nilp - 1);
    for (long n = 0; n <= stop; ++n) {
        double bn = std::fabs(beta.coeffs()[static_cast<std::size_t>(n)]);
        if (bn == 0.0) continue;
        Eigen::MatrixXcd Tn = T.power(static_cast<int>(n));
        S.noalias() += bn * (Tn.adjoint() * Tn);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((S + S.adjoint()) / 2.0,
                                                       Eigen::EigenvaluesOnly);
    double sup = es.eigenvalues().maxCoeff();
    return sup + beta.l1();
}

ComposeReport compose_check(const series::CoefficientSeries& f, const series::CoefficientSeries& g,
                            const FiniteOperator& T, const Eigen::MatrixXcd& B, double tol) {
    std::size_t len = f.size() + g.size();
    series::CoefficientSeries h = f.product(g, len);
    HereditaryResult lhs = hereditary_apply(h, T, B, tol);
    HereditaryResult inner = hereditary_apply(f, T, B, tol);
    HereditaryResult rhs = hereditary_apply(g, T, inner.op, tol);
    ComposeReport rep;
    rep.deviation = operators::operator_norm(lhs.op - rhs.op);
    rep.allowance = lhs.tail_bound + inner.tail_bound + rhs.tail_bound + tol;
    rep.agree = rep.deviation <= rep.allowance;
    return rep;
}

CertReport certify_a_contraction(const FiniteOperator& T, double a, double tol) {
    CertReport rep;
    HereditaryResult h;
    try {
        h = alpha_of_T(a, T, tol / 4.0);
    } catch (const Error& e) {
        rep.verdict = CertVerdict::inconclusive;
        rep.note = e.what();
        return rep;
    }
    Eigen::MatrixXcd H = (h.op + h.op.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.truncation_terms = h.terms;
    rep.truncation_bound = h.tail_bound;
    if (rep.min_eigenvalue >= -(tol + h.tail_bound))
        rep.verdict = CertVerdict::certified_nonneg;
    else
        rep.verdict = CertVerdict::certified_negative;
    return rep;
}

namespace {

std::vector<std::vector<double>> probe_power_norm_sequences(const OperatorOrShift& T,
                                                            long length, unsigned seed) {
    std::vector<std::vector<double>> out;
    if (std::holds_alternative<shifts::ShiftSpec>(T)) {
        const auto& sp = std::get<shifts::ShiftSpec>(T);
        for (long m = 0; m <= 12; ++m) {
            std::vector<double> lam(static_cast<std::size_t>(length));
            for (long n = 0; n < length; ++n) lam[n] = shifts::power_norm_sq(sp, n, m);
            out.push_back(std::move(lam));
        }
        return out;
    }
    const auto& op = std::get<FiniteOperator>(T);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXcd> probes;
    for (int i = 0; i < op.dim(); ++i)
        probes.push_back(Eigen::VectorXcd::Unit(op.dim(), i));
    for (int r = 0; r < 2; ++r) {
        Eigen::VectorXcd v(op.dim());
        for (int i = 0; i < op.dim(); ++i) v(i) = std::complex<double>(nd(rng), nd(rng));
        probes.push_back(v / v.norm());
    }
    for (const auto& h : probes) {
        std::vector<double> lam(static_cast<std::size_t>(length));
        for (long n = 0; n < length; ++n) lam[n] = (op.power(static_cast<int>(n)) * h).squaredNorm();
        out.push_back(std::move(lam));
    }
    return out;
}

// (I-nabla)^k Lambda at n, exact finite sum.
double int_diff(const std::vector<double>& lam, int k, long n) {
    double s = 0.0, c = 0.0;
    for (int i = 0; i <= k; ++i) {
        double p = ((i % 2) ? -1.0 : 1.0) * fracdiff::binomial(k, i) *
                   lam[static_cast<std::size_t>(n + i)];
        double t = s + p;
        if (std::fabs(s) >= std::fabs(p))
            c += (s - t) + p;
        else
            c += (p - t) + s;
        s = t;
    }
    return s + c;
}

} // namespace

IsometryReport certify_a_isometry(const OperatorOrShift& T, double a, long horizon, double tol,
                                  unsigned seed) {
    if (!(a > 0.0)) throw DomainError("certify_a_isometry: a > 0 required");
    const bool a_integral = std::fabs(a - std::nearbyint(a)) < 1e-12;
    int m = a_integral ? static_cast<int>(std::llround(a)) - 1
                       : static_cast<int>(std::ceil(a)) - 1;
    IsometryReport rep;
    rep.poly_degree = m;
    rep.is_isometry = true;
    long length = horizon + m + 2;
    for (const auto& lam : probe_power_norm_sequences(T, length, seed)) {
        double scale = 1.0;
        for (double v : lam) scale = std::max(scale, std::fabs(v));
        auto seq = fracdiff::RealSequence(
            [&lam](long n) {
                return n < static_cast<long>(lam.size()) ? lam[static_cast<std::size_t>(n)] : 0.0;
            },
            {scale, 0.0}, std::nullopt, false);
        auto fit = fracdiff::poly_solution_check(seq, m, horizon, tol);
        rep.max_fit_residual = std::max(rep.max_fit_residual, fit.max_residual / scale);
        if (!fit.is_poly) rep.is_isometry = false;
        for (long n = 0; n + m + 1 < length; ++n) {
            double d = std::fabs(int_diff(lam, m + 1, n)) / scale;
            rep.max_diff_residual = std::max(rep.max_diff_residual, d);
            if (d > tol) rep.is_isometry = false;
        }
    }
    return rep;
}

EvenOddReport even_odd_check(const OperatorOrShift& T, int m, int branch, long horizon,
                             double tol, unsigned seed) {
    if (m < 1) throw DomainError("even_odd_check: m >= 1 required");
    if (branch != 1 && branch != 2) throw DomainError("even_odd_check: branch is 1 or 2");
    EvenOddReport rep;
    rep.hypothesis_ok = true;
    rep.conclusion_ok = true;
    rep.min_value = std::numeric_limits<double>::infinity();
    long length = horizon + 2 * m + 2;
    for (const auto& lam : probe_power_norm_sequences(T, length, seed)) {
        double scale = 1.0;
        for (double v : lam) scale = std::max(scale, std::fabs(v));
        int hyp_order = branch == 1 ? 2 * m + 1 : 2 * m;
        int con_order = branch == 1 ? 2 * m : 2 * m - 1;
        for (long n = 0; n + hyp_order < length; ++n)
            if (int_diff(lam, hyp_order, n) < -tol * scale) {
                rep.hypothesis_ok = false;
                rep.note = "order-" + std::to_string(hyp_order) + " difference negative at n=" +
                           std::to_string(n);
            }
        if (branch == 2) {
            // o(n^{2m-1}) test: the scaled sequence must shrink along dyadic n.
            double prev = std::numeric_limits<double>::infinity();
            for (long n = 4; n < length; n *= 2) {
                double ratio = lam[static_cast<std::size_t>(n)] / std::pow(n + 1.0, 2.0 * m - 1.0);
                if (ratio > prev * 1.05) {
                    rep.hypothesis_ok = false;
                    rep.note = "little-o growth hypothesis fails";
                }
                prev = ratio;
            }
        }
        for (long n = 0; n + con_order < length; ++n) {
            double d = int_diff(lam, con_order, n);
            rep.min_value = std::min(rep.min_value, d / scale);
            if (d < -tol * scale) rep.conclusion_ok = false;
        }
        if (branch == 1)
            for (long n = 0; n < length; ++n)
                rep.growth_ratio = std::max(
                    rep.growth_ratio, lam[static_cast<std::size_t>(n)] / std::pow(n + 1.0, 2.0 * m));
    }
    return rep;
}

} // namespace fdlab::operator_cert
