#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "nbundle/rng.hpp"
#include "nbundle/space.hpp"

using namespace nbundle;

TEST_CASE("build_space dimensions and basis ordering") {
    const auto s1 = build_space(1);
    CHECK(s1.dim == 4);
    CHECK(s1.index(0, 0) == 0);  // |0g>
    CHECK(s1.index(0, 1) == 1);  // |0e>
    CHECK(s1.index(1, 0) == 2);  // |1g>
    CHECK(s1.index(1, 1) == 3);  // |1e>

    CHECK(build_space(10).dim == 22);
    CHECK_THROWS_AS(build_space(0), std::invalid_argument);
    CHECK_THROWS_AS(build_space(-3), std::invalid_argument);
}

TEST_CASE("basis index mapping is a bijection") {
    const auto s = build_space(7);
    std::vector<bool> hit(s.dim, false);
    for (int n = 0; n <= s.n_max; ++n)
        for (int e = 0; e < 2; ++e) {
            const int idx = s.index(n, e);
            REQUIRE(idx >= 0);
            REQUIRE(idx < s.dim);
            CHECK(!hit[idx]);
            hit[idx] = true;
            CHECK(s.photon_of(idx) == n);
            CHECK(s.emitter_of(idx) == e);
        }
}

TEST_CASE("annihilation operators act on the correct factors") {
    const auto s = build_space(3);
    const auto ops = build_operators(s);

    SUBCASE("a lowers |1g> to |0g>") {
        const Vec v = ops.a * basis_state(s, 1, 0);
        CHECK((v - basis_state(s, 0, 0)).norm() == doctest::Approx(0.0));
    }
    SUBCASE("sigma lowers the emitter, identity on photons") {
        const Vec v = ops.sigma * basis_state(s, 2, 1);
        CHECK((v - basis_state(s, 2, 0)).norm() == doctest::Approx(0.0));
        CHECK((ops.sigma * basis_state(s, 2, 0)).norm() == 0.0);
    }
    SUBCASE("number operator spectrum is {0..n_max}, each twice") {
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(ops.a.adjoint() * ops.a),
                                              Eigen::EigenvaluesOnly);
        const RealVec ev = es.eigenvalues();
        for (int n = 0; n <= s.n_max; ++n) {
            CHECK(ev(2 * n) == doctest::Approx(double(n)).epsilon(1e-12));
            CHECK(ev(2 * n + 1) == doctest::Approx(double(n)).epsilon(1e-12));
        }
    }
    SUBCASE("truncated commutator [a, a+] diagonal") {
        const Mat comm = ops.a * ops.a.adjoint() - ops.a.adjoint() * ops.a;
        for (int n = 0; n <= s.n_max; ++n)
            for (int e = 0; e < 2; ++e) {
                const double expected = (n == s.n_max) ? -double(s.n_max) : 1.0;
                CHECK(comm(s.index(n, e), s.index(n, e)).real() ==
                      doctest::Approx(expected));
            }
    }
}

TEST_CASE("expectation values") {
    const auto s = build_space(4);
    const auto ops = build_operators(s);
    const Mat num = ops.a.adjoint() * ops.a;

    SUBCASE("vacuum photon number is zero") {
        const Vec v = basis_state(s, 0, 0);
        const Mat rho = v * v.adjoint();
        CHECK(std::abs(expectation(rho, num)) < 1e-15);
    }
    SUBCASE("identity traces to one") {
        const Vec v = basis_state(s, 3, 1);
        const Mat rho = v * v.adjoint();
        CHECK(expectation(rho, Mat(Mat::Identity(s.dim, s.dim))).real() ==
              doctest::Approx(1.0));
    }
    SUBCASE("(|0> + |2>)/sqrt(2) has mean photon number 1") {
        Vec v = (basis_state(s, 0, 0) + basis_state(s, 2, 0)) / std::sqrt(2.0);
        const Mat rho = v * v.adjoint();
        CHECK(expectation(rho, num).real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch throws") {
        const auto s2 = build_space(2);
        const Mat rho = Mat::Identity(s2.dim, s2.dim) / double(s2.dim);
        CHECK_THROWS_AS(expectation(rho, num), std::invalid_argument);
    }
}

namespace {

Mat random_matrix(const SpaceDescriptor& s, UniformRng& rng) {
    Mat m(s.dim, s.dim);
    for (int i = 0; i < s.dim; ++i)
        for (int j = 0; j < s.dim; ++j)
            m(i, j) = Complex(2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0);
    return m;
}

} // namespace

TEST_CASE("operator algebra properties") {
    const auto s = build_space(5);
    const auto ops = build_operators(s);
    UniformRng rng(20240501);

    SUBCASE("adjoint is an involution") {
        const Mat m = random_matrix(s, rng);
        CHECK((Mat(m.adjoint().eval().adjoint()) - m).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("expectation is linear in the operator") {
        for (int rep = 0; rep < 5; ++rep) {
            Mat rho = random_matrix(s, rng);
            rho = (rho * rho.adjoint()).eval();
            rho /= rho.trace();
            const Mat A = random_matrix(s, rng);
            const Mat B = random_matrix(s, rng);
            const Complex alpha(rng.next(), rng.next());
            const Complex beta(rng.next(), rng.next());
            const Complex lhs = expectation(rho, Mat(alpha * A + beta * B));
            const Complex rhs =
                alpha * expectation(rho, A) + beta * expectation(rho, B);
            CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
        }
    }
    SUBCASE("a+ a composition equals the diagonal number operator") {
        const Mat num = ops.a.adjoint() * ops.a;
        Mat expected = Mat::Zero(s.dim, s.dim);
        for (int n = 0; n <= s.n_max; ++n)
            for (int e = 0; e < 2; ++e)
                expected(s.index(n, e), s.index(n, e)) = double(n);
        // sqrt(n)^2 re-rounds, so equality holds to one ulp of n.
        CHECK((num - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("density matrix validation") {
    const auto s = build_space(2);
    const Mat good = Mat::Identity(s.dim, s.dim) / double(s.dim);
    CHECK_NOTHROW(validate_density_matrix(good));

    Mat bad_trace = good * 2.0;
    CHECK_THROWS_AS(validate_density_matrix(bad_trace), std::runtime_error);

    Mat not_hermitian = good;
    not_hermitian(0, 1) = Complex(0.1, 0.2);
    CHECK_THROWS_AS(validate_density_matrix(not_hermitian), std::runtime_error);

    Mat negative = Mat::Zero(s.dim, s.dim);
    negative(0, 0) = -0.5;
    negative(1, 1) = 1.5;
    CHECK_THROWS_AS(validate_density_matrix(negative), std::runtime_error);
}
