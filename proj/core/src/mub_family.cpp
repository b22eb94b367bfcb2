#include "mubsa/mub_family.hpp"

#include "mubsa/prime.hpp"

#include <cmath>
#include <stdexcept>

namespace mubsa {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Roots of unity W^m for m = 0..d-1, evaluated on reduced exponents so
// large exponents never reach sin/cos.
std::vector<std::complex<double>> root_table(int d) {
    std::vector<std::complex<double>> w(d);
    for (int m = 0; m < d; ++m) {
        w[m] = std::polar(1.0, kTwoPi * m / d);
    }
    return w;
}

} // namespace

MubFamily::MubFamily(int d, Eigen::MatrixXcd stacked)
    : d_(d), root_(std::polar(1.0, kTwoPi / d)), stacked_(std::move(stacked)) {}

MubFamily MubFamily::build(int d) {
    require_odd_prime(d);
    const auto w = root_table(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    Eigen::MatrixXcd stacked(d, static_cast<Eigen::Index>(d) * (d + 1));
    stacked.leftCols(d) = Eigen::MatrixXcd::Identity(d, d);

    for (int k = 2; k <= d + 1; ++k) {
        auto block = stacked.middleCols(static_cast<Eigen::Index>(d) * (k - 1), d);
        for (int j = 0; j < d; ++j) {
            // (j^2 - j) is even, so the quadratic phase is an integer power of W.
            const long long quad =
                (static_cast<long long>(k - 2) *
                 ((static_cast<long long>(j) * j - j) / 2)) % d;
            long long e = quad; // exponent for r = 0
            for (int r = 0; r < d; ++r) {
                block(j, r) = w[static_cast<std::size_t>(e)] * scale;
                e += j;
                if (e >= d) e -= d;
            }
        }
    }
    return MubFamily(d, std::move(stacked));
}

MubFamily MubFamily::from_bases(const std::vector<Eigen::MatrixXcd>& bases) {
    if (bases.empty()) throw std::invalid_argument("empty basis list");
    const int d = static_cast<int>(bases.front().rows());
    if (static_cast<int>(bases.size()) != d + 1) {
        throw std::invalid_argument("a family of dimension d needs d+1 bases");
    }
    Eigen::MatrixXcd stacked(d, static_cast<Eigen::Index>(d) * (d + 1));
    for (int k = 0; k <= d; ++k) {
        if (bases[k].rows() != d || bases[k].cols() != d) {
            throw std::invalid_argument("basis matrices must all be d x d");
        }
        stacked.middleCols(static_cast<Eigen::Index>(d) * k, d) = bases[k];
    }
    return MubFamily(d, std::move(stacked));
}

MubFamily::BaseView MubFamily::base(int k) const {
    if (k < 1 || k > d_ + 1) throw std::out_of_range("base index out of range");
    return stacked_.middleCols(static_cast<Eigen::Index>(d_) * (k - 1), d_);
}

Eigen::MatrixXcd::ConstColXpr MubFamily::base_column(int k, int r) const {
    if (k < 1 || k > d_ + 1) throw std::out_of_range("base index out of range");
    if (r < 0 || r >= d_) throw std::out_of_range("column index out of range");
    return stacked_.col(static_cast<Eigen::Index>(d_) * (k - 1) + r);
}

MubVerifyReport verify_mub(const MubFamily& family, double tol) {
    const int d = family.dim();
    const double target = 1.0 / std::sqrt(static_cast<double>(d));
    MubVerifyReport report;
    report.tolerance = tol;

    double unit_dev = 0.0;
    // Track |entry|^2 extremes; |sqrt(t) - c| over a set of t values is
    // attained at the smallest or largest t, so one sqrt at the end suffices.
    double cross_min_sq = 1.0, cross_max_sq = 0.0;

    Eigen::MatrixXcd product;
    for (int a = 1; a <= d + 1; ++a) {
        const auto lhs = family.base(a);
        const Eigen::Index tail_cols =
            family.stacked().cols() - static_cast<Eigen::Index>(d) * (a - 1);
        product.noalias() =
            lhs.adjoint() * family.stacked().rightCols(tail_cols);

        // Leading d x d block is M_a^H M_a; the rest are cross products.
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const std::complex<double> v =
                    product(i, j) - (i == j ? 1.0 : 0.0);
                unit_dev = std::max(unit_dev, std::abs(v));
            }
        }
        const Eigen::Index cross_cols = product.cols() - d;
        const double* data =
            reinterpret_cast<const double*>(product.data() + static_cast<Eigen::Index>(d) * d);
        const Eigen::Index n = cross_cols * d;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double re = data[2 * t];
            const double im = data[2 * t + 1];
            const double sq = re * re + im * im;
            if (sq < cross_min_sq) cross_min_sq = sq;
            if (sq > cross_max_sq) cross_max_sq = sq;
        }
    }

    double cross_dev = 0.0;
    if (d >= 1) {
        cross_dev = std::max(std::abs(std::sqrt(cross_max_sq) - target),
                             std::abs(std::sqrt(cross_min_sq) - target));
    }
    report.unitarity_deviation = unit_dev;
    report.unbiasedness_deviation = cross_dev;
    report.unitary_ok = unit_dev <= tol;
    report.unbiased_ok = cross_dev <= tol;
    return report;
}

} // namespace mubsa
