#ifndef FDLAB_MODEL_SIM_HPP
#define FDLAB_MODEL_SIM_HPP

#include "fdlab/operators.hpp"

#include <span>
#include <string>

namespace fdlab::model_sim {

using operators::FiniteOperator;

struct ModelReport {
    int defect_rank = 0;
    int quotient_dim = 0;
    double isometry_defect = 0.0;        // max |  ||Gx||^2 - ||x||^2  |
    double intertwining_residual = 0.0;  // || M G - G T ||
    double norm_identity_residual = 0.0; // worst residual of the split norm identity
    long depth = 0;
    double tail_bound = 0.0;
};

std::string serialize(const ModelReport& r);

// D = (alpha(T*,T))^{1/2} for alpha = (1-t)^a; requires the nonneg
// certificate and reconstructs D^2 to 1e-10.
Eigen::MatrixXcd defect(const FiniteOperator& T, double a, double tol = 1e-9);

// rho_{N,m} = sum_{n=N+1}^m k_n alpha_{m-n} = -sum_{j<=N} k_j alpha_{m-j},
// computed by the short second form; positive for 0 < a < 1.
double rho(long N, long m, double a);

// u_r(m) = sum_{n+j=m} r^n k_n alpha_j, the coefficients of
// (1-t)^a / (1-rt)^a.
double u_coeff(double r, long m, double a);

struct DecayScan {
    double max_scaled_increment = 0.0;      // over m in [2, m_max]
    double max_scaled_increment_head = 0.0; // over m in [2, 100]
};

// max over the r-grid and m of m^{1+a} |u_r(m) - u_r(m-1)|; the head maximum
// is reported separately for boundedness comparisons.
DecayScan u_decay_scan(double a, long m_max, std::span<const double> r_grid);

// Proof-of-model realization: defect D, embedding G into the weighted-shift
// model, quotient seminorm, and the intertwining residual. Exact for
// nilpotent T; spectral radius < 1 handled with certified depth.
ModelReport build_model(const FiniteOperator& T, double a, long truncation_depth,
                        double tol = 1e-9);

struct GapReport {
    double shift_growth_exponent = 0.0;
    double model_growth_cap = 0.0;
    bool separated = false;
    bool shift_is_a_contraction = false;
};

// Growth obstruction for a in (2j-1, 2j]: the forward shift with weight
// s in (m, a+1) outgrows every part of the proposed model.
GapReport counterexample_gap(double a, double s, long n_max, double margin = 0.1);

} // namespace fdlab::model_sim

#endif
