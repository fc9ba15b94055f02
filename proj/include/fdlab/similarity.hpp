#ifndef FDLAB_SIMILARITY_HPP
#define FDLAB_SIMILARITY_HPP

#include "fdlab/operators.hpp"
#include "fdlab/series.hpp"

#include <optional>
#include <string>
#include <variant>

namespace fdlab::similarity {

using operators::FiniteOperator;

struct PositivizerResult {
    bool found = false;
    series::CoefficientSeries g;
    bool tail_certified = false; // product positivity certified past the window
    std::string description;
    long candidates_tried = 0;
};

// Searches a candidate family (the identity, then truncated geometric
// kernels (1-rt)^{-q} over a deterministic grid) for g with g > 0 and
// [f g]_window > 0 in the coefficient order. For polynomial f the positivity
// of the product past the window is certified exactly; otherwise the result
// is window-certified and flagged. NotFound is a value, not an error.
PositivizerResult search_positivizer(const series::CoefficientSeries& f, long window,
                                     long budget);

struct ConjugateResult {
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd T; // B T_hat B^{-1}
    double epsilon = 0.0;
    double condition = 0.0;
    double reconstruction_residual = 0.0;
};

// B^2 = h(T_hat*, T_hat) >= eps I; B is the PSD square root via Hermitian
// eigendecomposition with eigenvalue floor eps/2.
ConjugateResult conjugate_by_sqrt(const FiniteOperator& T_hat,
                                  const series::CoefficientSeries& h, double tol);

struct SimilarityCertificate {
    series::CoefficientSeries g;
    series::CoefficientSeries h;
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd T;
    double epsilon = 0.0;
    double alpha_min_eig = 0.0;
    double compose_residual = 0.0;        // both sides of the operator identity
    double reconstruction_residual = 0.0; // || B^{-1} (B T_hat B^{-1}) B - T_hat ||
    bool tail_certified = false;
};

struct Refusal {
    std::string stage; // gamma-psd | positivizer | coercivity | alpha-psd | compose
    std::string detail;
};

using VerifyOutcome = std::variant<SimilarityCertificate, Refusal>;

// Full pipeline: certify gamma(T_hat*,T_hat) >= 0 for gamma = alpha *
// gamma_tilde, find or accept a positivizer g for gamma_tilde, conjugate by
// the square root of h(T_hat*,T_hat) with h = gamma_tilde * g, and certify
// alpha(T*,T) >= 0 for the conjugated operator, cross-checking the two
// hereditary expansions of the same operator identity.
VerifyOutcome verify_similarity(const FiniteOperator& T_hat,
                                const series::CoefficientSeries& alpha,
                                const series::CoefficientSeries& gamma_tilde,
                                std::optional<series::CoefficientSeries> g, double tol);

std::string serialize(const SimilarityCertificate& cert, const std::string& b_ref,
                      const std::string& t_ref);

} // namespace fdlab::similarity

#endif
