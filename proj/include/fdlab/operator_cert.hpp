#ifndef FDLAB_OPERATOR_CERT_HPP
#define FDLAB_OPERATOR_CERT_HPP

#include "fdlab/operators.hpp"
#include "fdlab/series.hpp"
#include "fdlab/shifts.hpp"

#include <string>
#include <variant>

namespace fdlab::operator_cert {

using operators::FiniteOperator;

struct HereditaryResult {
    Eigen::MatrixXcd op;
    long terms = 0;
    double tail_bound = 0.0; // operator-norm bound on the dropped tail
};

// f(T*,T)(B) = sum_n f_n T^{*n} B T^n, truncated once the certified tail
// ||T^N||^2 sup_k ||T^k||^2-guarded l1 remainder drops below tol. Exact for
// nilpotent T. B must be Hermitian within 1e-12 (relative).
HereditaryResult hereditary_apply(const series::CoefficientSeries& f, const FiniteOperator& T,
                                  const Eigen::MatrixXcd& B, double tol);

// (1-t)^a(T*,T), i.e. hereditary application of the Cesaro coefficients of
// (1-t)^a to the identity.
HereditaryResult alpha_of_T(double a, const FiniteOperator& T, double tol);

// sup_{N<=n_max} || sum_{n<=N} |beta_n| T^{*n} T^n || + l1(beta). The partial
// sums are PSD-monotone, so the supremum is the last term.
double at_norm(const series::CoefficientSeries& beta, const FiniteOperator& T, long n_max);

struct ComposeReport {
    double deviation = 0.0;
    double allowance = 0.0;
    bool agree = false;
};

// Checks (fg)(T*,T)(B) = g(T*,T)( f(T*,T)(B) ).
ComposeReport compose_check(const series::CoefficientSeries& f, const series::CoefficientSeries& g,
                            const FiniteOperator& T, const Eigen::MatrixXcd& B, double tol);

enum class CertVerdict { certified_nonneg, certified_negative, inconclusive };

const char* to_string(CertVerdict v);

struct CertReport {
    double min_eigenvalue = 0.0;
    long truncation_terms = 0;
    double truncation_bound = 0.0;
    CertVerdict verdict = CertVerdict::inconclusive;
    std::string note;
};

// Sign certificate for (1-t)^a(T*,T) from the minimum eigenvalue of the
// Hermitized truncation with the tail bound folded in.
CertReport certify_a_contraction(const FiniteOperator& T, double a, double tol = 1e-9);

using OperatorOrShift = std::variant<FiniteOperator, shifts::ShiftSpec>;

struct IsometryReport {
    bool is_isometry = false;
    int poly_degree = 0;          // m with m < a <= m+1
    double max_fit_residual = 0.0;  // worst polynomial-fit residual
    double max_diff_residual = 0.0; // worst |(1-nabla)^{m+1} Lambda_n|
};

// Checks both faces of the a-isometry characterization on power-norm
// sequences: degree-<=m polynomial fit and vanishing (m+1)-st differences.
// Probes basis vectors plus seeded random vectors for matrices, basis
// indices 0..dim-ish for shifts.
IsometryReport certify_a_isometry(const OperatorOrShift& T, double a, long horizon,
                                  double tol = 1e-9, unsigned seed = 1);

struct EvenOddReport {
    bool hypothesis_ok = false;
    bool conclusion_ok = false;
    double min_value = 0.0;       // worst entry of the concluded difference
    double growth_ratio = 0.0;    // branch (i): max ||T^n x||^2/(n+1)^{2m}
    std::string note;
};

// Branch 1: a (2m+1)-contraction is a 2m-contraction with ||T^n x||^2
// growing at most like (n+1)^{2m}. Branch 2: a 2m-contraction with
// ||T^n x||^2 = o(n^{2m-1}) is a (2m-1)-contraction. Hypothesis failures are
// reported, not thrown.
EvenOddReport even_odd_check(const OperatorOrShift& T, int m, int branch, long horizon,
                             double tol = 1e-9, unsigned seed = 1);

} // namespace fdlab::operator_cert

#endif
