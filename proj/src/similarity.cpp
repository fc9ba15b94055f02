#include "fdlab/similarity.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/operator_cert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fdlab::similarity {

namespace {

void check_positive_on_unit_interval(const series::CoefficientSeries& f) {
    // 1e-3 grid with a Lipschitz slack from the derivative bound sum n |f_n|
    // plus the l1 mass of the unstored tail.
    double lip = 0.0;
    for (std::size_t n = 1; n < f.size(); ++n) lip += n * std::fabs(f.coeffs()[n]);
    double slack = lip * 5e-4 + f.l1_tail_bound();
    for (int i = 0; i <= 1000; ++i) {
        double t = i * 1e-3;
        if (!(f.eval(t) > slack))
            throw PreconditionError("positivizer: f not certifiably positive on [0,1] near t=" +
                                    std::to_string(t));
    }
}

long poly_degree(const series::CoefficientSeries& f) {
    if (f.tail()) return -1; // not a polynomial
    long deg = 0;
    for (std::size_t n = 0; n < f.size(); ++n)
        if (f.coeffs()[n] != 0.0) deg = static_cast<long>(n);
    return deg;
}

// Exact positivity of p_n = sum_j f_j r^{n-j} k^q(n-j) for all n > window:
// p_n = r^n Q(n) with Q a polynomial of degree <= q-1 <= 2 in n.
bool tail_positive_poly_f(const series::CoefficientSeries& f, double r, int q, long window) {
    long J = poly_degree(f);
    if (J < 0) return false;
    auto Q = [&](double n) {
        double acc = 0.0;
        for (long j = 0; j <= J; ++j)
            acc += f.coeffs()[static_cast<std::size_t>(j)] * std::pow(r, -static_cast<double>(j)) *
                   cesaro::number(q, static_cast<long>(n) - j);
        return acc;
    };
    // Q has degree q-1; sample q points past the window and reconstruct.
    double w1 = static_cast<double>(window + 1);
    if (q == 1) return Q(w1) > 0.0;
    if (q == 2) {
        double q1 = Q(w1), q2 = Q(w1 + 1);
        double slope = q2 - q1;
        return q1 > 0.0 && slope >= 0.0;
    }
    // q == 3: quadratic c2 n^2 + c1 n + c0 through three samples
    double y0 = Q(w1), y1 = Q(w1 + 1), y2 = Q(w1 + 2);
    double c2 = (y2 - 2.0 * y1 + y0) / 2.0;
    if (y0 <= 0.0) return false;
    if (c2 < 0.0) return false;
    double c1 = (y1 - y0) - c2 * (2.0 * w1 + 1.0);
    if (c2 == 0.0) return (y1 - y0) >= 0.0;
    double vertex = -c1 / (2.0 * c2);
    if (vertex <= w1) return true;
    double lo = std::floor(vertex), hi = std::ceil(vertex);
    return Q(lo) > 0.0 && Q(hi) > 0.0;
}

bool window_positive_product(const series::CoefficientSeries& f,
                             const series::CoefficientSeries& g, long window, double slack) {
    auto p = f.product(g, static_cast<std::size_t>(window) + 1);
    if (!(p.coeff(0) > 0.0)) return false;
    for (long n = 1; n <= window; ++n)
        if (p.coeff(static_cast<std::size_t>(n)) < -slack) return false;
    return true;
}

} // namespace

PositivizerResult search_positivizer(const series::CoefficientSeries& f, long window,
                                     long budget) {
    if (window < 4) throw DomainError("search_positivizer: window >= 4 required");
    check_positive_on_unit_interval(f);
    double fmax = 0.0;
    for (double c : f.coeffs()) fmax = std::max(fmax, std::fabs(c));
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, fmax);
    const bool f_poly = poly_degree(f) >= 0 && poly_degree(f) <= window;

    PositivizerResult res;
    res.g = series::CoefficientSeries(std::vector<double>{1.0});

    // Identity candidate first: f itself already coefficient-positive.
    ++res.candidates_tried;
    if (series::strictly_positive_head(f, slack) && f.coeff(0) > 0.0) {
        res.found = true;
        res.tail_certified = !f.tail(); // finite heads certify themselves
        res.description = "1";
        return res;
    }

    for (int q = 1; q <= 3; ++q) {
        for (int ri = 1; ri <= 19; ++ri) {
            if (res.candidates_tried >= budget) return res; // NotFound
            ++res.candidates_tried;
            double r = 0.05 * ri;
            auto g = series::CoefficientSeries::geometric_kernel(
                r, q, static_cast<std::size_t>(window) + 1);
            if (!window_positive_product(f, g, window, slack)) continue;
            bool tail_ok = f_poly && tail_positive_poly_f(f, r, q, window);
            res.found = true;
            res.g = g;
            res.tail_certified = tail_ok;
            char buf[48];
            std::snprintf(buf, sizeof buf, "(1-%.2ft)^-%d", r, q);
            res.description = buf;
            return res;
        }
    }
    return res; // NotFound
}

ConjugateResult conjugate_by_sqrt(const FiniteOperator& T_hat,
                                  const series::CoefficientSeries& h, double tol) {
    auto hr = operator_cert::hereditary_apply(
        h, T_hat, Eigen::MatrixXcd::Identity(T_hat.dim(), T_hat.dim()), tol);
    Eigen::MatrixXcd B2 = (hr.op + hr.op.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B2);
    double eps = es.eigenvalues().minCoeff();
    double top = es.eigenvalues().maxCoeff();
    if (!(eps > tol * std::max(1.0, top)))
        throw NotCoerciveError("conjugate_by_sqrt: smallest eigenvalue " + std::to_string(eps) +
                               " not coercive");
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(eps / 2.0);
    Eigen::MatrixXcd V = es.eigenvectors();
    Eigen::MatrixXcd B = V * w.cwiseSqrt().asDiagonal() * V.adjoint();
    Eigen::MatrixXcd Binv = V * w.cwiseSqrt().cwiseInverse().asDiagonal() * V.adjoint();
    ConjugateResult out;
    out.B = B;
    out.T = B * T_hat.matrix() * Binv;
    out.epsilon = eps;
    out.condition = top / eps;
    out.reconstruction_residual = operators::operator_norm(Binv * out.T * B - T_hat.matrix());
    return out;
}

VerifyOutcome verify_similarity(const FiniteOperator& T_hat,
                                const series::CoefficientSeries& alpha,
                                const series::CoefficientSeries& gamma_tilde,
                                std::optional<series::CoefficientSeries> g_opt, double tol) {
    const int d = T_hat.dim();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    const std::size_t len =
        std::max<std::size_t>(alpha.size() + gamma_tilde.size(), static_cast<std::size_t>(d) + 2);

    // Stage 1: gamma(T_hat*, T_hat) >= 0 for gamma = alpha * gamma_tilde.
    series::CoefficientSeries gamma = alpha.product(gamma_tilde, len);
    Eigen::MatrixXcd gamma_op;
    double gamma_tail = 0.0;
    try {
        auto hr = operator_cert::hereditary_apply(gamma, T_hat, I, tol / 4.0);
        gamma_op = (hr.op + hr.op.adjoint()) / 2.0;
        gamma_tail = hr.tail_bound;
    } catch (const Error& e) {
        return Refusal{"gamma-psd", e.what()};
    }
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gamma_op, Eigen::EigenvaluesOnly);
        double mn = es.eigenvalues().minCoeff();
        if (mn < -(tol + gamma_tail))
            return Refusal{"gamma-psd", "min eigenvalue " + std::to_string(mn)};
    }

    // Stage 2: positivizer for gamma_tilde.
    PositivizerResult pos;
    try {
        const long window = std::max<long>(64, 4L * d);
        if (g_opt) {
            pos.g = *g_opt;
            pos.found = true;
            pos.description = "caller";
            double fmax = 1.0;
            const double slack = 64.0 * std::numeric_limits<double>::epsilon() * fmax;
            if (!series::strictly_positive_head(pos.g, slack) ||
                !window_positive_product(gamma_tilde, pos.g, window, slack))
                return Refusal{"positivizer", "supplied g fails the coefficient-order checks"};
            pos.tail_certified = false; // caller-supplied g is window-certified only
        } else {
            pos = search_positivizer(gamma_tilde, window, 256);
            if (!pos.found) return Refusal{"positivizer", "no candidate in budget"};
        }
    } catch (const Error& e) {
        return Refusal{"positivizer", e.what()};
    }

    // Stage 3: coercivity and conjugation; h = gamma_tilde * g.
    series::CoefficientSeries h =
        gamma_tilde.product(pos.g, std::max<std::size_t>(len, pos.g.size()));
    ConjugateResult conj;
    try {
        conj = conjugate_by_sqrt(T_hat, h, tol);
    } catch (const Error& e) {
        return Refusal{"coercivity", e.what()};
    }

    // Stage 4: alpha(T*,T) >= 0 for the conjugated operator.
    SimilarityCertificate cert;
    cert.g = pos.g;
    cert.h = h;
    cert.B = conj.B;
    cert.T = conj.T;
    cert.epsilon = conj.epsilon;
    cert.reconstruction_residual = conj.reconstruction_residual;
    cert.tail_certified = pos.tail_certified;
    try {
        FiniteOperator T(conj.T);
        auto hr = operator_cert::hereditary_apply(alpha, T, I, tol / 4.0);
        Eigen::MatrixXcd H = (hr.op + hr.op.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
        cert.alpha_min_eig = es.eigenvalues().minCoeff();
        if (cert.alpha_min_eig < -(tol + hr.tail_bound))
            return Refusal{"alpha-psd", "min eigenvalue " + std::to_string(cert.alpha_min_eig)};
    } catch (const Error& e) {
        return Refusal{"alpha-psd", e.what()};
    }

    // Stage 5: both hereditary expansions of the same operator:
    // sum alpha_n T_hat^{*n} h(T_hat*,T_hat) T_hat^n
    //   = sum g_n T_hat^{*n} gamma(T_hat*,T_hat) T_hat^n.
    try {
        auto b2 = operator_cert::hereditary_apply(h, T_hat, I, tol / 4.0);
        auto lhs = operator_cert::hereditary_apply(alpha, T_hat, (b2.op + b2.op.adjoint()) / 2.0,
                                                   tol / 4.0);
        auto rhs = operator_cert::hereditary_apply(pos.g, T_hat, gamma_op, tol / 4.0);
        cert.compose_residual = operators::operator_norm(lhs.op - rhs.op);
        double allowance = tol + lhs.tail_bound + rhs.tail_bound + b2.tail_bound + gamma_tail;
        if (cert.compose_residual > allowance)
            return Refusal{"compose", "operator identity residual " +
                                          std::to_string(cert.compose_residual)};
    } catch (const Error& e) {
        return Refusal{"compose", e.what()};
    }
    return cert;
}

std::string serialize(const SimilarityCertificate& cert, const std::string& b_ref,
                      const std::string& t_ref) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "epsilon=%.12g alpha_min_eig=%.12g compose_residual=%.6e",
                  cert.epsilon, cert.alpha_min_eig, cert.compose_residual);
    os << buf;
    std::snprintf(buf, sizeof buf, " reconstruction_residual=%.6e tail_certified=%d",
                  cert.reconstruction_residual, cert.tail_certified ? 1 : 0);
    os << buf;
    os << " g=";
    for (std::size_t i = 0; i < cert.g.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.12g", i ? "," : "", cert.g.coeffs()[i]);
        os << buf;
    }
    os << " h=";
    for (std::size_t i = 0; i < cert.h.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.12g", i ? "," : "", cert.h.coeffs()[i]);
        os << buf;
    }
    os << " B=@" << b_ref << " T=@" << t_ref;
    return os.str();
}

} // namespace fdlab::similarity
