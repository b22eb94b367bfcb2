#include "mubsa/transform.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace mubsa;
using mubsa::test::random_unit_vector;

TEST_CASE("phase diagonal basics") {
    const PhaseDiagonal h2 = phase_diagonal(5, 2);
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(h2.diag[j] - std::complex<double>(1.0, 0.0)) < 1e-15);
    }

    const PhaseDiagonal h3 = phase_diagonal(3, 3);
    const std::complex<double> omega = std::polar(1.0, 2.0 * M_PI / 3.0);
    CHECK(std::abs(h3.diag[0] - 1.0) < 1e-15);
    CHECK(std::abs(h3.diag[1] - 1.0) < 1e-15);
    CHECK(std::abs(h3.diag[2] - omega) < 1e-15);

    CHECK_THROWS_AS(phase_diagonal(5, 1), std::invalid_argument);
    CHECK_THROWS_AS(phase_diagonal(5, 7), std::invalid_argument);
    CHECK_THROWS_AS(phase_diagonal(4, 2), std::invalid_argument);
}

TEST_CASE("diagonal factor reproduces each base from the DFT base") {
    for (int d : {3, 7}) {
        const MubFamily family = MubFamily::build(d);
        for (int k = 2; k <= d + 1; ++k) {
            const PhaseDiagonal h = phase_diagonal(d, k);
            CHECK((h.diag.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
            const Eigen::MatrixXcd produced =
                h.diag.asDiagonal() * family.base(2);
            CAPTURE(d);
            CAPTURE(k);
            CHECK((produced - family.base(k)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("prime-length DFT on basis and flat vectors") {
    const int d = 7;
    const double s = 1.0 / std::sqrt(double(d));
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(d);
    e1[0] = 1.0;

    const Eigen::VectorXcd flat = dft_prime(e1, Direction::forward);
    for (int i = 0; i < d; ++i) {
        CHECK(std::abs(flat[i] - std::complex<double>(s, 0.0)) < 1e-12);
    }
    const Eigen::VectorXcd back = dft_prime(flat, Direction::inverse);
    CHECK((back - e1).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::VectorXcd ones = Eigen::VectorXcd::Constant(d, s);
    const Eigen::VectorXcd spike = dft_prime(ones, Direction::forward);
    CHECK(std::abs(spike[0] - 1.0) < 1e-12);
    CHECK(spike.tail(d - 1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chirp-z DFT agrees with the matrix product") {
    RandomSource rng(1001);
    const int d = 11;
    const MubFamily family = MubFamily::build(d);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::VectorXcd x = random_unit_vector(d, rng);
        const Eigen::VectorXcd fast = dft_prime(x, Direction::forward);
        const Eigen::VectorXcd naive = family.base(2).adjoint() * x;
        CHECK((fast - naive).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::VectorXcd fast_inv = dft_prime(x, Direction::inverse);
        const Eigen::VectorXcd naive_inv = family.base(2) * x;
        CHECK((fast_inv - naive_inv).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("analysis fast path matches the naive product") {
    RandomSource rng(77);
    const int d = 7;
    const MubFamily family = MubFamily::build(d);
    const MubTransformer tx(d);

    SUBCASE("identity base returns the input") {
        const Eigen::VectorXcd x = random_unit_vector(d, rng);
        CHECK((tx.analyze(x, 1) - x).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("base 2 of a spike is flat") {
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(d);
        e1[0] = 1.0;
        const Eigen::VectorXcd s = tx.analyze(e1, 2);
        CHECK((s.cwiseAbs().array() - 1.0 / std::sqrt(double(d)))
                  .abs()
                  .maxCoeff() < 1e-12);
    }
    SUBCASE("random vectors, every base") {
        for (int rep = 0; rep < 30; ++rep) {
            const Eigen::VectorXcd x = random_unit_vector(d, rng);
            for (int k = 1; k <= d + 1; ++k) {
                const Eigen::VectorXcd fast = tx.analyze(x, k);
                const Eigen::VectorXcd naive = mub_analyze_naive(family, x, k);
                CHECK((fast - naive).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
}

TEST_CASE("synthesis inverts analysis in every base") {
    RandomSource rng(78);
    for (int d : {3, 5, 7, 11, 13}) {
        const MubTransformer tx(d);
        const MubFamily family = MubFamily::build(d);
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::VectorXcd x = random_unit_vector(d, rng);
            for (int k = 1; k <= d + 1; ++k) {
                const Eigen::VectorXcd s = tx.analyze(x, k);
                CHECK((tx.synthesize(s, k) - x).cwiseAbs().maxCoeff() < 1e-10);
                // unitarity preserves energy
                CHECK(std::abs(s.norm() - x.norm()) < 1e-9);
            }
        }
        // basis-vector synthesis picks out a column
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(d);
        e1[0] = 1.0;
        CHECK((tx.synthesize(e1, 3) -
               Eigen::VectorXcd(family.base_column(3, 0)))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("largest spectrum entries respect the pairwise bound") {
    // m_j < m_i/sqrt(d) + sqrt(1-m_i^2) for every base pair, and some base
    // always exceeds 1/sqrt(d)
    RandomSource rng(79);
    for (int d : {3, 5, 7}) {
        const MubTransformer tx(d);
        const double inv_sqrt_d = 1.0 / std::sqrt(double(d));
        for (int rep = 0; rep < 300; ++rep) {
            const Eigen::VectorXcd x = random_unit_vector(d, rng);
            Eigen::VectorXd m(d + 1);
            for (int k = 1; k <= d + 1; ++k) {
                m[k - 1] = tx.analyze(x, k).cwiseAbs().maxCoeff();
            }
            for (int i = 0; i <= d; ++i) {
                for (int j = 0; j <= d; ++j) {
                    if (i == j) continue;
                    CHECK(m[j] < m[i] * inv_sqrt_d +
                                     std::sqrt(std::max(0.0, 1.0 - m[i] * m[i])) +
                                     1e-9);
                }
            }
            CHECK(m.maxCoeff() > inv_sqrt_d + 1e-12);
        }
    }
}

TEST_CASE("ring shifts permute the absolute spectra" *
          doctest::description("observational report, no assertion")) {
    // Shifting x cyclically shows up as a cyclic shift of |S_k|; the
    // observed offset pattern is printed for the record.
    const int d = 7;
    RandomSource rng(80);
    const MubTransformer tx(d);
    const Eigen::VectorXcd x = random_unit_vector(d, rng);
    Eigen::VectorXcd shifted(d);
    for (int j = 0; j < d; ++j) shifted[j] = x[(j + d - 1) % d];

    std::string offsets;
    for (int k = 1; k <= d + 1; ++k) {
        const Eigen::VectorXd a = tx.analyze(x, k).cwiseAbs();
        const Eigen::VectorXd b = tx.analyze(shifted, k).cwiseAbs();
        int best_shift = -1;
        double best = 1e9;
        for (int off = 0; off < d; ++off) {
            double dev = 0.0;
            for (int i = 0; i < d; ++i) {
                dev = std::max(dev, std::abs(b[i] - a[(i + off) % d]));
            }
            if (dev < best) {
                best = dev;
                best_shift = off;
            }
        }
        offsets += " k" + std::to_string(k) + ":" + std::to_string(best_shift) +
                   (best < 1e-9 ? "" : "?");
    }
    MESSAGE("absolute-spectrum shifts under a one-step ring shift:" << offsets);
}
