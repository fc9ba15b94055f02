#include "fdlab/model_sim.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/operator_cert.hpp"
#include "fdlab/shifts.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace fdlab::model_sim {

namespace {

void check_model_order(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("model: order a in (0,1) required");
}

} // namespace

std::string serialize(const ModelReport& r) {
    char buf[96];
    std::ostringstream os;
    os << "defect_rank=" << r.defect_rank << " quotient_dim=" << r.quotient_dim;
    std::snprintf(buf, sizeof buf, " isometry_defect=%.6e intertwining_residual=%.6e",
                  r.isometry_defect, r.intertwining_residual);
    os << buf;
    std::snprintf(buf, sizeof buf, " norm_identity_residual=%.6e depth=%ld tail_bound=%.6e",
                  r.norm_identity_residual, r.depth, r.tail_bound);
    os << buf;
    return os.str();
}

Eigen::MatrixXcd defect(const FiniteOperator& T, double a, double tol) {
    check_model_order(a);
    auto cert = operator_cert::certify_a_contraction(T, a, tol);
    if (cert.verdict != operator_cert::CertVerdict::certified_nonneg)
        throw NotContractError("defect: operator is not a certified a-contraction (" +
                               std::string(operator_cert::to_string(cert.verdict)) + ")");
    auto h = operator_cert::alpha_of_T(a, T, tol / 4.0);
    Eigen::MatrixXcd H = (h.op + h.op.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXd w = es.eigenvalues();
    for (int i = 0; i < w.size(); ++i) {
        if (w(i) < -(tol + h.tail_bound))
            throw NotContractError("defect: negative eigenvalue " + std::to_string(w(i)));
        w(i) = std::max(w(i), 0.0);
    }
    Eigen::MatrixXcd D = es.eigenvectors() * w.cwiseSqrt().asDiagonal() *
                         es.eigenvectors().adjoint();
    if (operators::operator_norm(D * D - H) > 1e-10)
        throw InconsistencyError("defect: square-root reconstruction above 1e-10");
    return D;
}

double rho(long N, long m, double a) {
    check_model_order(a);
    if (!(N >= 0 && m >= N + 1)) throw DomainError("rho: need 0 <= N < m");
    // short form: -sum_{j=0}^{N} k^a(j) alpha_{m-j}, alpha = coeffs of (1-t)^a
    std::vector<double> k = cesaro::coefficients(a, static_cast<std::size_t>(N) + 1);
    std::vector<double> alpha = cesaro::coefficients(-a, static_cast<std::size_t>(m) + 1);
    std::vector<double> terms(static_cast<std::size_t>(N) + 1);
    for (long j = 0; j <= N; ++j) terms[j] = k[j] * alpha[m - j];
    return -kernels::sum_compensated(terms);
}

double u_coeff(double r, long m, double a) {
    check_model_order(a);
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("u_coeff: r in [0,1] required");
    if (m < 0) throw DomainError("u_coeff: m >= 0 required");
    std::vector<double> k = cesaro::coefficients(a, static_cast<std::size_t>(m) + 1);
    std::vector<double> alpha = cesaro::coefficients(-a, static_cast<std::size_t>(m) + 1);
    std::vector<double> terms(static_cast<std::size_t>(m) + 1);
    double rp = 1.0;
    for (long n = 0; n <= m; ++n) {
        terms[n] = rp * k[n] * alpha[m - n];
        rp *= r;
    }
    return kernels::sum_compensated(terms);
}

DecayScan u_decay_scan(double a, long m_max, std::span<const double> r_grid) {
    check_model_order(a);
    if (m_max < 2) throw DomainError("u_decay_scan: m_max >= 2 required");
    DecayScan scan;
    std::vector<double> k = cesaro::coefficients(a, static_cast<std::size_t>(m_max) + 1);
    std::vector<double> alpha = cesaro::coefficients(-a, static_cast<std::size_t>(m_max) + 1);
    std::vector<double> rk(k.size()), u(k.size());
    for (double r : r_grid) {
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("u_decay_scan: r in [0,1] required");
        double rp = 1.0;
        for (std::size_t n = 0; n < k.size(); ++n) {
            rk[n] = rp * k[n];
            rp *= r;
        }
        kernels::conv_prefix(rk, alpha, u);
        for (long m = 2; m <= m_max; ++m) {
            double inc = std::pow(static_cast<double>(m), 1.0 + a) * std::fabs(u[m] - u[m - 1]);
            scan.max_scaled_increment = std::max(scan.max_scaled_increment, inc);
            if (m <= 100)
                scan.max_scaled_increment_head = std::max(scan.max_scaled_increment_head, inc);
        }
    }
    return scan;
}

ModelReport build_model(const FiniteOperator& T, double a, long truncation_depth, double tol) {
    check_model_order(a);
    ModelReport rep;
    const int d = T.dim();

    // Scalar unimodular operator: null defect, full quotient, and the
    // isometric part is multiplication by the eigenvalue (closed form; the
    // series certificate cannot terminate here).
    if (d == 1 && std::fabs(std::abs(T.matrix()(0, 0)) - 1.0) < 1e-12) {
        rep.defect_rank = 0;
        rep.quotient_dim = 1;
        rep.depth = 0;
        return rep;
    }

    Eigen::MatrixXcd D = defect(T, a, tol); // also certifies the contraction

    auto nilp = T.nilpotent_index();
    long depth = -1;
    double tail = 0.0;
    if (nilp) {
        depth = *nilp; // DT^n x = 0 from n = depth on
    } else {
        // Smallest checkpoint with a certified k-weighted power tail below
        // tol, capped at 10^4. Since 0 < a < 1 the weights k_n <= 1, and with
        // a contraction window (K, M, rhoK):
        //   sum_{n>N} k_n ||D T^n x||^2
        //     <= ||D||^2 ||T^N||^2 M^2 K / (1 - rhoK^2).
        double dn = operators::operator_norm(D);
        long K = 0;
        double M = 1.0, rhoK = 1.0, running_max = 1.0;
        for (long k = 1; k <= 512; ++k) {
            double nk = T.power_norm(static_cast<int>(k));
            if (nk < 1.0) {
                K = k;
                M = running_max;
                rhoK = nk;
                break;
            }
            running_max = std::max(running_max, nk);
        }
        if (K == 0)
            throw DepthError("build_model: no contracting power within 512 steps");
        for (long N = 4; N <= 10000; N *= 2) {
            double nrm = T.power_norm(static_cast<int>(N));
            double bound = dn * dn * nrm * nrm * M * M * K / (1.0 - rhoK * rhoK);
            if (bound < tol) {
                depth = N;
                tail = bound;
                break;
            }
        }
        if (depth < 0)
            throw DepthError("build_model: power tail not certifiable within depth 10^4");
    }
    if (truncation_depth > 0) {
        if (truncation_depth < depth)
            throw DepthError("build_model: series tail exceeds tol at the requested depth " +
                             std::to_string(truncation_depth));
        // the certified minimal depth is used; deeper rows would be zero/tail
    }
    rep.depth = depth;
    rep.tail_bound = tail;

    // Defect space basis: eigenvectors of D with eigenvalue above rank_tol.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esD(D);
    double rank_tol = 1e-12 * std::max(1.0, esD.eigenvalues().maxCoeff());
    std::vector<int> cols;
    for (int i = 0; i < d; ++i)
        if (esD.eigenvalues()(i) > rank_tol) cols.push_back(i);
    rep.defect_rank = static_cast<int>(cols.size());
    Eigen::MatrixXcd Q(d, rep.defect_rank); // orthonormal basis of the defect space
    for (int i = 0; i < rep.defect_rank; ++i) Q.col(i) = esD.eigenvectors().col(cols[i]);

    std::vector<double> k = cesaro::coefficients(a, static_cast<std::size_t>(depth) + 2);

    // G maps x to sqrt(k_n) * (defect coordinates of D T^n x), n = 0..depth.
    const int rows = static_cast<int>((depth + 1) * rep.defect_rank);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(rows, d);
    for (long n = 0; n <= depth; ++n) {
        Eigen::MatrixXcd block = std::sqrt(k[n]) * (Q.adjoint() * D * T.power(static_cast<int>(n)));
        G.block(n * rep.defect_rank, 0, rep.defect_rank, d) = block;
    }

    // Quotient seminorm on the basis probes: ||x||^2 - sum k_n ||D T^n x||^2.
    int quotient = 0;
    double max_q = 0.0;
    for (int i = 0; i < d; ++i) {
        double q = 1.0 - G.col(i).squaredNorm();
        max_q = std::max(max_q, std::fabs(q));
        if (q > std::max(tol, tail) * 16.0) ++quotient;
    }
    rep.quotient_dim = quotient;

    // Isometry defect of G over the probe set (exact quotient contribution is
    // null when quotient == 0).
    Eigen::MatrixXcd gram = G.adjoint() * G;
    if (quotient == 0)
        rep.isometry_defect = (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    else
        rep.isometry_defect = max_q; // reported against the head embedding only

    // Intertwining with B_a tensor I on the head block.
    Eigen::MatrixXcd Ba = shifts::truncate({shifts::Direction::backward, a},
                                           static_cast<int>(depth) + 1)
                              .matrix();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rows, rows);
    for (long i = 0; i <= depth; ++i)
        for (long j = 0; j <= depth; ++j)
            if (Ba(i, j) != 0.0)
                M.block(i * rep.defect_rank, j * rep.defect_rank, rep.defect_rank,
                        rep.defect_rank) =
                    Ba(i, j) * Eigen::MatrixXcd::Identity(rep.defect_rank, rep.defect_rank);
    rep.intertwining_residual = operators::operator_norm(M * G - G * T.matrix());

    // Norm identity at several split points for seeded random probes. The
    // split sums terminate at the nilpotency index; otherwise the certified
    // tail is granted as an allowance.
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
        Eigen::VectorXcd x(d);
        for (int i = 0; i < d; ++i) x(i) = std::complex<double>(nd(rng), nd(rng));
        x /= x.norm();
        long max_split = std::min<long>(depth - 1, nilp ? d : 8);
        for (long N = 0; N <= max_split; ++N) {
            double head = 0.0;
            for (long n = 0; n <= N; ++n)
                head += k[n] * (D * (T.power(static_cast<int>(n)) * x)).squaredNorm();
            double rest = 0.0;
            for (long m = N + 1; m <= depth; ++m) {
                double r = rho(N, m, a);
                rest += r * (T.power(static_cast<int>(m)) * x).squaredNorm();
            }
            double resid = std::fabs(1.0 - head - rest);
            if (!nilp) resid = std::max(0.0, resid - 2.0 * tail);
            rep.norm_identity_residual = std::max(rep.norm_identity_residual, resid);
        }
    }
    return rep;
}

GapReport counterexample_gap(double a, double s, long n_max, double margin) {
    // a in union_j (2j-1, 2j]: the integer m with m-1 < a <= m must be even.
    long m = static_cast<long>(std::ceil(a - 1e-12));
    if (!(a > 0.0) || m < 2 || (m % 2) != 0)
        throw DomainError("counterexample_gap: a must lie in some (2j-1, 2j]");
    if (!(s > static_cast<double>(m) && s < a + 1.0))
        throw DomainError("counterexample_gap: s in (m, a+1) required");
    if (n_max < 16) throw DomainError("counterexample_gap: n_max too small");

    shifts::ShiftSpec fs{shifts::Direction::forward, s};
    GapReport rep;
    rep.model_growth_cap = static_cast<double>(m - 1);
    rep.shift_is_a_contraction =
        shifts::classify(fs, a).verdict == shifts::Verdict::nonneg;

    // log-log least squares over the dyadic subsample n = 2^k <= n_max
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (long n = 1; n <= n_max; n *= 2) {
        double x = std::log(n + 1.0);
        double y = std::log(shifts::operator_norm_sq_estimate(fs, n));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    rep.shift_growth_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.separated = rep.shift_growth_exponent > rep.model_growth_cap + margin;
    return rep;
}

} // namespace fdlab::model_sim
