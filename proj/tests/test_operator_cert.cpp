#include "doctest.h"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/operator_cert.hpp"
#include "fdlab/operators.hpp"
#include "fdlab/shifts.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

using namespace fdlab;
using operators::FiniteOperator;
using namespace operator_cert;

namespace {

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = std::complex<double>(nd(rng), nd(rng));
    return m;
}

FiniteOperator random_strict_contraction(std::mt19937_64& rng, int d, double norm_cap) {
    Eigen::MatrixXcd m = random_complex(rng, d);
    m *= norm_cap / operators::operator_norm(m);
    return FiniteOperator(std::move(m));
}

Eigen::MatrixXcd random_psd(std::mt19937_64& rng, int d) {
    Eigen::MatrixXcd m = random_complex(rng, d);
    return m * m.adjoint() / double(d);
}

} // namespace

TEST_CASE("spectral radius gate and matrix io") {
    CHECK_THROWS_AS(FiniteOperator(2.0 * Eigen::MatrixXcd::Identity(3, 3)), SpectralRadiusError);
    std::mt19937_64 rng(3);
    auto T = random_strict_contraction(rng, 5, 0.9);
    std::stringstream ss;
    operators::write_matrix(ss, T.matrix());
    auto U = operators::read_matrix(ss);
    CHECK((U.matrix() - T.matrix()).cwiseAbs().maxCoeff() == 0.0); // bit-exact round trip
}

TEST_CASE("hereditary application: zero operator and scalars") {
    FiniteOperator Z(Eigen::MatrixXcd::Zero(3, 3));
    series::CoefficientSeries one_minus_t({1.0, -1.0});
    auto r = hereditary_apply(one_minus_t, Z, Eigen::MatrixXcd::Identity(3, 3), 1e-12);
    CHECK((r.op - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

    FiniteOperator lam(0.6 * Eigen::MatrixXcd::Identity(1, 1));
    auto h = alpha_of_T(0.5, lam, 1e-11);
    CHECK(h.op(0, 0).real() == doctest::Approx(std::pow(1.0 - 0.36, 0.5)).epsilon(1e-9));
    CHECK(h.tail_bound <= 1e-11);
}

TEST_CASE("hereditary application is exact on nilpotent operators") {
    std::mt19937_64 rng(17);
    auto T = shifts::truncate({shifts::Direction::backward, 0.8}, 5);
    auto B = random_psd(rng, 5);
    std::vector<double> coeffs(11);
    std::normal_distribution<double> nd;
    for (auto& c : coeffs) c = nd(rng);
    series::CoefficientSeries f(coeffs);
    auto r = hereditary_apply(f, T, B, 1e-12);
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(5, 5);
    for (int n = 0; n < 5; ++n)
        direct += coeffs[n] * (T.power(n).adjoint() * B * T.power(n));
    CHECK((r.op - direct).cwiseAbs().maxCoeff() <= 1e-13 * direct.cwiseAbs().maxCoeff());
    CHECK(r.tail_bound == 0.0);
    // Hermiticity of the output
    CHECK((r.op - r.op.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(hereditary_apply(f, T, Eigen::MatrixXcd(T.matrix()), 1e-12),
                    NotHermitianError);
}

TEST_CASE("quadratic form of alpha(T*,T) matches the series of power norms") {
    std::mt19937_64 rng(23);
    auto T = shifts::truncate({shifts::Direction::backward, 0.9}, 6);
    auto h = alpha_of_T(0.4, T, 1e-12);
    std::normal_distribution<double> nd;
    auto alpha = cesaro::coefficients(-0.4, 6);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXcd x(6);
        for (int i = 0; i < 6; ++i) x(i) = std::complex<double>(nd(rng), nd(rng));
        double lhs = (x.adjoint() * h.op * x)(0, 0).real();
        double rhs = 0.0;
        for (int n = 0; n < 6; ++n) rhs += alpha[n] * (T.power(n) * x).squaredNorm();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("the A_T norm on simple series") {
    std::mt19937_64 rng(5);
    auto T = random_strict_contraction(rng, 4, 0.8);
    CHECK(at_norm(series::CoefficientSeries({1.0}), T, 10) == doctest::Approx(2.0));
    FiniteOperator Z(Eigen::MatrixXcd::Zero(2, 2));
    CHECK(at_norm(series::CoefficientSeries({0.0, 1.0}), Z, 10) == doctest::Approx(1.0));
    auto B08 = shifts::truncate({shifts::Direction::backward, 0.8}, 6);
    auto beta = cesaro::sequence({-0.5, 64});
    double v = at_norm(beta, B08, 63);
    CHECK(v >= beta.l1());
}

TEST_CASE("partial sums inside the A_T norm grow monotonically") {
    auto T = shifts::truncate({shifts::Direction::backward, 0.5}, 5);
    auto beta = cesaro::sequence({-0.7, 32});
    double prev = 0.0;
    for (long N : {0L, 1L, 2L, 4L}) {
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(5, 5);
        for (long n = 0; n <= N; ++n)
            S += std::fabs(beta.coeffs()[n]) * (T.power(int(n)).adjoint() * T.power(int(n)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
        double top = es.eigenvalues().maxCoeff();
        CHECK(top >= prev - 1e-14);
        prev = top;
    }
}

TEST_CASE("multiplicativity of the hereditary calculus") {
    // nilpotent Jordan block, exact
    auto J = shifts::truncate({shifts::Direction::backward, 1.0}, 3);
    series::CoefficientSeries f({1.0, -1.0});
    auto rep = compose_check(f, f, J, Eigen::MatrixXcd::Identity(3, 3), 1e-12);
    CHECK(rep.agree);
    CHECK(rep.deviation <= 1e-14);

    // scalars: (1-t), (1+t) at lambda I
    FiniteOperator lam(std::complex<double>(0.3, 0.4) * Eigen::MatrixXcd::Identity(1, 1));
    series::CoefficientSeries gplus({1.0, 1.0});
    auto lhs = hereditary_apply(f.product(gplus, 4), lam,
                                Eigen::MatrixXcd::Identity(1, 1), 1e-10);
    double l2 = 0.25;
    CHECK(lhs.op(0, 0).real() == doctest::Approx((1 - l2) * (1 + l2)).epsilon(1e-9));

    // random polynomials on a random strict contraction
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
        auto T = random_strict_contraction(rng, 5, 0.85);
        std::vector<double> fc(5), gc(5);
        for (auto& c : fc) c = nd(rng);
        for (auto& c : gc) c = nd(rng);
        auto B = random_psd(rng, 5);
        auto r = compose_check(series::CoefficientSeries(fc), series::CoefficientSeries(gc), T,
                               B, 1e-10);
        CHECK(r.agree);
        CHECK(r.deviation <= 1e-10);
    }
}

TEST_CASE("contraction certificates") {
    FiniteOperator Z(Eigen::MatrixXcd::Zero(4, 4));
    auto r0 = certify_a_contraction(Z, 0.7);
    CHECK(r0.verdict == CertVerdict::certified_nonneg);
    CHECK(r0.min_eigenvalue == doctest::Approx(1.0));

    auto rb = certify_a_contraction(shifts::truncate({shifts::Direction::backward, 0.8}, 6), 0.5);
    CHECK(rb.verdict == CertVerdict::certified_nonneg);

    auto rf = certify_a_contraction(shifts::truncate({shifts::Direction::forward, 1.5}, 4), 1.2);
    CHECK(rf.verdict == CertVerdict::certified_negative);
    CHECK(rf.min_eigenvalue < 0.0);

    // order drop through an intermediate integer order
    auto T = shifts::truncate({shifts::Direction::backward, 1.6}, 6);
    CHECK(certify_a_contraction(T, 1.5).verdict == CertVerdict::certified_nonneg);
    CHECK(certify_a_contraction(T, 1.0).verdict == CertVerdict::certified_nonneg);
    CHECK(certify_a_contraction(T, 0.5).verdict == CertVerdict::certified_nonneg);
}

TEST_CASE("isometry certificates from power-norm sequences") {
    auto rep = certify_a_isometry(shifts::ShiftSpec{shifts::Direction::forward, 2.0}, 1.7, 40);
    CHECK(rep.is_isometry);
    CHECK(rep.poly_degree == 1);

    Eigen::MatrixXcd rot(2, 2);
    double th = 0.83;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    auto rep2 = certify_a_isometry(FiniteOperator(rot), 0.5, 30);
    CHECK(rep2.is_isometry);
    CHECK(rep2.poly_degree == 0);

    auto rep3 = certify_a_isometry(FiniteOperator(0.9 * Eigen::MatrixXcd::Identity(2, 2)), 1.3, 30);
    CHECK_FALSE(rep3.is_isometry);
}

TEST_CASE("even-odd contraction ladder") {
    // normal strict contraction: all orders positive
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 0.9;
    d(1, 1) = 0.5;
    FiniteOperator D(d);
    auto r1 = even_odd_check(D, 1, 1, 40);
    CHECK(r1.hypothesis_ok);
    CHECK(r1.conclusion_ok);
    auto r2 = even_odd_check(D, 1, 2, 40);
    CHECK(r2.hypothesis_ok);
    CHECK(r2.conclusion_ok);

    // the order-2 isometry passes the even branch with quadratic growth
    auto rF = even_odd_check(shifts::ShiftSpec{shifts::Direction::forward, 2.0}, 1, 1, 40);
    CHECK(rF.hypothesis_ok);
    CHECK(rF.conclusion_ok);
    CHECK(rF.growth_ratio <= 2.0);

    // the even branch hypothesis fails without the little-o growth
    auto rBad = even_odd_check(shifts::ShiftSpec{shifts::Direction::forward, 3.5}, 1, 2, 40);
    CHECK_FALSE(rBad.hypothesis_ok);
}
