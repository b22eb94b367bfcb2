#ifndef MUBSA_TESTS_HELPERS_HPP
#define MUBSA_TESTS_HELPERS_HPP

#include "mubsa/rng.hpp"
#include "mubsa/spectra.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace mubsa::test {

inline Eigen::MatrixXcd random_complex_matrix(int rows, int cols,
                                              RandomSource& rng) {
    Eigen::MatrixXcd m(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            m(r, c) = std::complex<double>(rng.gaussian(), rng.gaussian());
        }
    }
    return m;
}

/// Random full-rank PSD matrix normalized to trace 1.
inline CorrelationMatrix random_psd(int d, RandomSource& rng) {
    const Eigen::MatrixXcd g = random_complex_matrix(d, d, rng);
    Eigen::MatrixXcd m = g * g.adjoint();
    m /= m.trace().real();
    return CorrelationMatrix::checked(m);
}

inline Eigen::VectorXcd random_unit_vector(int d, RandomSource& rng) {
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        v[i] = std::complex<double>(rng.gaussian(), rng.gaussian());
    }
    return v / v.norm();
}

/// Scratch directory unique to a test, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() /
                ("mubsa_test_" + name + "_" + std::to_string(::getpid()))) {
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

} // namespace mubsa::test

#endif // MUBSA_TESTS_HELPERS_HPP
