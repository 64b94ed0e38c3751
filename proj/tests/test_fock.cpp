#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kerrfock/fock.hpp"

using namespace kerrfock;
using Catch::Approx;

TEST_CASE("annihilation operator has sqrt(n) subdiagonal", "[fock]") {
    const Operator a3 = annihilation(3);
    CHECK(a3.matrix()(0, 1).real() == Approx(1.0));
    CHECK(a3.matrix()(1, 2).real() == Approx(std::sqrt(2.0)));
    CHECK(a3.matrix().cwiseAbs().sum() == Approx(1.0 + std::sqrt(2.0)));

    const Operator a2 = annihilation(2);
    CHECK(a2.matrix()(0, 1).real() == Approx(1.0));
    CHECK(a2.matrix().cwiseAbs().sum() == Approx(1.0));
}

TEST_CASE("canonical commutator holds below the truncation edge", "[fock]") {
    const Eigen::Index dim = 20;
    const Matrix a = annihilation(dim).matrix();
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    for (Eigen::Index i = 0; i + 1 < dim; ++i)
        for (Eigen::Index j = 0; j + 1 < dim; ++j)
            CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("annihilation lowers Fock states exactly", "[fock]") {
    const Eigen::Index dim = 12;
    const Matrix a = annihilation(dim).matrix();
    for (Eigen::Index n = 1; n < dim; ++n) {
        const Vector lowered = a * fock_state(n, dim).amplitudes();
        const Vector want = std::sqrt(static_cast<double>(n)) * fock_state(n - 1, dim).amplitudes();
        CHECK((lowered - want).norm() == 0.0);
    }
}

TEST_CASE("invalid dimensions are rejected", "[fock]") {
    CHECK_THROWS_AS(annihilation(1), DimensionError);
    CHECK_THROWS_AS(fock_state(0, 1), DimensionError);
    CHECK_THROWS_AS(fock_state(10, 10), IndexError);
}

TEST_CASE("displacement of zero is the identity", "[fock]") {
    const Matrix d = displacement(0.0, 10).matrix();
    CHECK((d - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("displaced vacuum has Poisson number statistics", "[fock]") {
    const Eigen::Index dim = 40;
    const Vector psi = displacement(1.0, dim).matrix() * fock_state(0, dim).amplitudes();
    double fact = 1.0;
    for (int n = 0; n <= 5; ++n) {
        if (n > 0) fact *= n;
        CHECK(std::norm(psi(n)) == Approx(std::exp(-1.0) / fact).margin(1e-8));
    }
}

TEST_CASE("displacement is unitary within truncation tolerance", "[fock]") {
    const Eigen::Index dim = 40;
    const Matrix d = displacement(0.5, dim).matrix();
    const Matrix dm = displacement(-0.5, dim).matrix();
    CHECK((d * dm - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((d * d.adjoint() - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("displaced Fock states", "[fock]") {
    CHECK((displaced_fock(0.0, 3, 10).amplitudes() - fock_state(3, 10).amplitudes()).norm() == 0.0);

    const StateVector f5 = fock_state(5, 10);
    CHECK(f5.amplitudes()(5).real() == Approx(1.0));
    CHECK(f5.norm() == Approx(1.0));

    // <a^t a> = n + |alpha|^2 for a displaced Fock state
    const StateVector psi = displaced_fock(0.3, 2, 40);
    const Complex nbar = expectation(number_operator(40), psi);
    CHECK(nbar.real() == Approx(2.09).margin(1e-6));
    CHECK(std::abs(nbar.imag()) < 1e-10);
}

TEST_CASE("expectation values on basic states", "[fock]") {
    CHECK(expectation(number_operator(10), fock_state(4, 10)).real() == Approx(4.0));

    for (int n : {0, 2, 5}) {
        const Complex x = expectation(drive_operator(10), fock_state(n, 10));
        CHECK(std::abs(x) < 1e-14);
    }

    const StateVector coh = coherent_state(1.0, 40);
    CHECK(expectation(number_operator(40), coh).real() == Approx(1.0).margin(1e-8));

    CHECK_THROWS_AS(expectation(number_operator(10), fock_state(1, 12)), DimensionError);
}

TEST_CASE("hermitian expectations are real for random states", "[fock]") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    const Eigen::Index dim = 16;
    const Operator h = drive_operator(dim);
    for (int trial = 0; trial < 20; ++trial) {
        Vector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
        const StateVector psi = StateVector(v).normalized();
        CHECK(std::abs(expectation(h, psi).imag()) <= 1e-10);
    }
}

TEST_CASE("hermitian flag validates symmetry", "[fock]") {
    Matrix bad = Matrix::Zero(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(Operator::hermitian(bad), NumericalError);
    bad(1, 0) = 1.0;
    CHECK(Operator::hermitian(bad).is_hermitian());
}

TEST_CASE("density matrix helpers", "[fock]") {
    const DensityMatrix rho = DensityMatrix::pure(fock_state(2, 8));
    CHECK(rho.trace_real() == Approx(1.0));
    CHECK(rho.hermiticity_defect() == 0.0);
    CHECK(rho.min_eigenvalue() == Approx(0.0).margin(1e-12));

    const StateVector top = fock_state(7, 8);
    CHECK(top.tail_population() == Approx(1.0));
    CHECK(fock_state(0, 8).tail_population() == 0.0);
}
