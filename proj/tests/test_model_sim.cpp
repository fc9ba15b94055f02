#include "doctest.h"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/model_sim.hpp"
#include "fdlab/operator_cert.hpp"
#include "fdlab/shifts.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace fdlab;
using operators::FiniteOperator;

TEST_CASE("defect operator square roots") {
    FiniteOperator Z(Eigen::MatrixXcd::Zero(4, 4));
    auto D0 = model_sim::defect(Z, 0.5);
    CHECK((D0 - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-13);

    FiniteOperator lam(0.5 * Eigen::MatrixXcd::Identity(1, 1));
    auto D1 = model_sim::defect(lam, 0.4, 1e-11);
    CHECK(D1(0, 0).real() == doctest::Approx(std::pow(0.75, 0.2)).epsilon(1e-8));

    auto T = shifts::truncate({shifts::Direction::backward, 0.8}, 5);
    auto D = model_sim::defect(T, 0.5);
    auto H = operator_cert::alpha_of_T(0.5, T, 1e-12).op;
    CHECK((D * D - H).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-13);

    // not an order-0.5 contraction: the forward shift in an odd interval
    CHECK_THROWS_AS(model_sim::defect(shifts::truncate({shifts::Direction::forward, 1.5}, 4), 0.9),
                    NotContractError);
}

TEST_CASE("rho coefficients: short form, long form, positivity") {
    CHECK(model_sim::rho(0, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(model_sim::rho(0, 2, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
    for (double a : {0.3, 0.5, 0.8}) {
        for (long N : {0L, 1L, 3L, 7L}) {
            CHECK(model_sim::rho(N, N + 1, a) ==
                  doctest::Approx(cesaro::number(a, N + 1)).epsilon(1e-13));
            for (long m = N + 1; m <= N + 24; ++m) {
                double short_form = model_sim::rho(N, m, a);
                // long form: sum_{n=N+1}^{m} k_n alpha_{m-n}
                auto k = cesaro::coefficients(a, m + 1);
                auto al = cesaro::coefficients(-a, m + 1);
                double long_form = 0.0;
                for (long n = N + 1; n <= m; ++n) long_form += k[n] * al[m - n];
                CHECK(std::fabs(short_form - long_form) <= 1e-12 * std::max(1.0, short_form));
                CHECK(short_form > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(model_sim::rho(3, 3, 0.5), DomainError);
}

TEST_CASE("u coefficients: anchors and the generating function") {
    for (double r : {0.0, 0.3, 0.8, 1.0}) CHECK(model_sim::u_coeff(r, 0, 0.5) == 1.0);
    for (long m = 1; m <= 9; ++m) CHECK(std::fabs(model_sim::u_coeff(1.0, m, 0.5)) <= 1e-12);
    // u_r(1) = k_1 r + alpha_1 = -a(1-r): the linear vanishing rate toward r=1
    for (double a : {0.3, 0.5, 0.8})
        for (double r : {0.0, 0.5, 0.8})
            CHECK(model_sim::u_coeff(r, 1, a) == doctest::Approx(-a * (1.0 - r)).epsilon(1e-13));
    CHECK(model_sim::u_coeff(0.8, 1, 0.5) == doctest::Approx(-0.1).epsilon(1e-13));
    // r = 0 collapses the convolution to the bare coefficients of (1-t)^a
    auto alpha = cesaro::coefficients(-0.6, 12);
    for (long m = 0; m <= 11; ++m)
        CHECK(model_sim::u_coeff(0.0, m, 0.6) == doctest::Approx(alpha[m]).epsilon(1e-14));

    // power-series division oracle for (1-t)^a / (1-rt)^a
    for (double a : {0.35, 0.8}) {
        for (double r : {0.5, 0.9}) {
            const long M = 200;
            auto num = cesaro::coefficients(-a, M + 1); // (1-t)^a
            std::vector<double> den(M + 1);             // (1-rt)^a
            double rp = 1.0;
            auto mal = cesaro::coefficients(-a, M + 1);
            for (long n = 0; n <= M; ++n) {
                den[n] = mal[n] * rp;
                rp *= r;
            }
            std::vector<double> q(M + 1);
            for (long n = 0; n <= M; ++n) {
                double acc = num[n];
                for (long k = 1; k <= n; ++k) acc -= den[k] * q[n - k];
                q[n] = acc / den[0];
            }
            for (long m = 0; m <= M; ++m)
                CHECK(std::fabs(model_sim::u_coeff(r, m, a) - q[m]) <= 1e-10);
        }
    }
}

TEST_CASE("scaled increments of u stay bounded") {
    std::vector<double> grid = {0.0, 0.5, 0.9, 0.99, 1.0};
    for (double a : {0.3, 0.8}) {
        auto scan = model_sim::u_decay_scan(a, 2000, grid);
        CHECK(scan.max_scaled_increment <= 10.0 * scan.max_scaled_increment_head);
    }
    // the r=1 row vanishes identically past m=1
    auto scan1 = model_sim::u_decay_scan(0.5, 50, std::vector<double>{1.0});
    CHECK(scan1.max_scaled_increment <= 1e-10);
}

TEST_CASE("model realization on nilpotent truncations") {
    for (double a : {0.3, 0.5, 0.8}) {
        for (int d : {5, 8, 12}) {
            double s = std::max(a + 0.1, 0.9);
            auto T = shifts::truncate({shifts::Direction::backward, s}, d);
            auto rep = model_sim::build_model(T, a, 0, 1e-10);
            CHECK(rep.quotient_dim == 0);
            CHECK(rep.isometry_defect <= 1e-10);
            CHECK(rep.intertwining_residual <= 1e-10);
            CHECK(rep.norm_identity_residual <= 1e-10);
            CHECK(rep.depth == d);
        }
    }
}

TEST_CASE("model realization of the zero operator and of scalars") {
    FiniteOperator Z(Eigen::MatrixXcd::Zero(4, 4));
    auto rz = model_sim::build_model(Z, 0.5, 0, 1e-11);
    CHECK(rz.defect_rank == 4);
    CHECK(rz.quotient_dim == 0);
    CHECK(rz.isometry_defect <= 1e-13);
    CHECK(rz.intertwining_residual <= 1e-13);

    // strict scalar contraction: the binomial identity empties the quotient
    FiniteOperator lam(0.5 * Eigen::MatrixXcd::Identity(1, 1));
    auto rl = model_sim::build_model(lam, 0.5, 0, 1e-9);
    CHECK(rl.quotient_dim == 0);
    CHECK(rl.isometry_defect <= 1e-8);

    // unimodular scalar: null defect, the quotient carries everything
    FiniteOperator uni(std::polar(1.0, 0.7) * Eigen::MatrixXcd::Identity(1, 1));
    auto ru = model_sim::build_model(uni, 0.5, 0, 1e-9);
    CHECK(ru.defect_rank == 0);
    CHECK(ru.quotient_dim == 1);

    auto rm = model_sim::serialize(rz);
    CHECK(rm.find("quotient_dim=0") != std::string::npos);
}

TEST_CASE("parts of the shift-model block stay contractions of the same order") {
    const double a = 0.5;
    auto Ba = shifts::truncate({shifts::Direction::backward, a}, 5).matrix();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(10, 10);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (Ba(i, j) != 0.0)
                M.block(2 * i, 2 * j, 2, 2) = Ba(i, j) * Eigen::MatrixXcd::Identity(2, 2);
    // coordinate subspaces closed under the action (downward in the shift index)
    std::vector<std::vector<int>> subspaces = {
        {0, 1, 2, 3, 4, 5, 6, 7, 8, 9},   // whole block
        {0, 1, 2, 3},                     // indices (0,*), (1,*)
        {0, 2, 4, 6},                     // one tensor leg
        {0, 1},
    };
    for (const auto& idx : subspaces) {
        int k = int(idx.size());
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M.rows(), k);
        for (int i = 0; i < k; ++i) P(idx[i], i) = 1.0;
        Eigen::MatrixXcd comp = P.adjoint() * M * P;
        // invariance: nothing leaks out of the subspace
        CHECK((M * P - P * comp).cwiseAbs().maxCoeff() <= 1e-12);
        auto cert = operator_cert::certify_a_contraction(FiniteOperator(comp), a, 1e-10);
        CHECK(cert.verdict == operator_cert::CertVerdict::certified_nonneg);
    }
    // unitary directions contribute partial sums k^{1-a}(N), positive and
    // decreasing to zero, so the unitary summand passes in the limit
    double partial = 1.0, prev = 2.0;
    for (long N = 1; N <= 4096; ++N) {
        partial *= (N + (1 - a) - 1.0) / N; // k^{1-a}(N)
        CHECK(partial > 0.0);
        CHECK(partial < prev);
        prev = partial;
    }
}

TEST_CASE("growth obstruction separates the forward shift from low-degree models") {
    auto rep = model_sim::counterexample_gap(2.0, 2.5, 1L << 14);
    CHECK(rep.shift_is_a_contraction);
    CHECK(rep.model_growth_cap == 1.0);
    CHECK(rep.shift_growth_exponent == doctest::Approx(1.5).epsilon(0.04));
    CHECK(rep.separated);

    auto rep2 = model_sim::counterexample_gap(1.9, 2.2, 1L << 13);
    CHECK(rep2.separated);

    CHECK_THROWS_AS(model_sim::counterexample_gap(2.0, 2.0, 1L << 13), DomainError);
    CHECK_THROWS_AS(model_sim::counterexample_gap(0.5, 0.7, 1L << 13), DomainError);
}
