#include "mubsa/transform.hpp"

#include "mubsa/prime.hpp"

#include <cmath>
#include <stdexcept>

namespace mubsa {
namespace {

constexpr double kPi = 3.14159265358979323846;

int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}

// In-place iterative radix-2 FFT, size must be a power of two.
// sign = -1 forward, +1 inverse (unscaled).
void fft_pow2(std::complex<double>* a, int n,
              const std::vector<std::complex<double>>& twiddle, int sign) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int step = n / len;
        for (int i = 0; i < n; i += len) {
            int tw = 0;
            for (int j = 0; j < len / 2; ++j, tw += step) {
                std::complex<double> w = twiddle[tw];
                if (sign > 0) w = std::conj(w);
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace

PhaseDiagonal phase_diagonal(int d, int k) {
    require_odd_prime(d);
    if (k < 2 || k > d + 1) {
        throw std::invalid_argument(
            "phase diagonal is defined for bases 2..d+1");
    }
    PhaseDiagonal h;
    h.d = d;
    h.base_index = k;
    h.diag.resize(d);
    for (int j = 0; j < d; ++j) {
        const long long e = (static_cast<long long>(k - 2) *
                             ((static_cast<long long>(j) * j - j) / 2)) % d;
        h.diag[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / d);
    }
    return h;
}

DftPlan::DftPlan(int length) : d_(length) {
    if (length < 1) throw std::invalid_argument("DFT length must be positive");
    conv_size_ = next_pow2(2 * d_ - 1);
    scale_ = 1.0 / std::sqrt(static_cast<double>(d_));

    // twiddles for the power-of-two FFT: exp(-2*pi*i*j/conv_size)
    twiddle_.resize(conv_size_ / 2);
    for (int j = 0; j < conv_size_ / 2; ++j) {
        twiddle_[j] = std::polar(1.0, -2.0 * kPi * j / conv_size_);
    }

    // chirp c_n = exp(-i*pi*n^2/d); n^2 is reduced mod 2d so the angle
    // stays in [0, 2*pi) and keeps full precision at large lengths.
    chirp_.resize(d_);
    for (int n = 0; n < d_; ++n) {
        const long long e = (static_cast<long long>(n) * n) % (2LL * d_);
        chirp_[n] = std::polar(1.0, -kPi * static_cast<double>(e) / d_);
    }

    // kernel b_m = conj(c_m) wrapped cyclically, transformed once.
    std::vector<std::complex<double>> b(conv_size_, {0.0, 0.0});
    for (int m = 0; m < d_; ++m) {
        b[m] = std::conj(chirp_[m]);
        if (m > 0) b[conv_size_ - m] = std::conj(chirp_[m]);
    }
    fft_pow2(b.data(), conv_size_, twiddle_, -1);
    kernel_fft_ = std::move(b);
}

void DftPlan::raw_forward(std::vector<std::complex<double>>& buf) const {
    fft_pow2(buf.data(), conv_size_, twiddle_, -1);
    for (int i = 0; i < conv_size_; ++i) buf[i] *= kernel_fft_[i];
    fft_pow2(buf.data(), conv_size_, twiddle_, +1);
    const double inv = 1.0 / conv_size_;
    for (int i = 0; i < conv_size_; ++i) buf[i] *= inv;
}

Eigen::VectorXcd DftPlan::forward(const Eigen::VectorXcd& x) const {
    if (x.size() != d_) throw std::invalid_argument("length mismatch");
    std::vector<std::complex<double>> buf(conv_size_, {0.0, 0.0});
    for (int n = 0; n < d_; ++n) buf[n] = x[n] * chirp_[n];
    raw_forward(buf);
    Eigen::VectorXcd out(d_);
    for (int k = 0; k < d_; ++k) out[k] = buf[k] * chirp_[k] * scale_;
    return out;
}

Eigen::VectorXcd DftPlan::inverse(const Eigen::VectorXcd& s) const {
    // M_2 s = conj(M_2^H conj(s)) since M_2 is symmetric.
    return forward(s.conjugate()).conjugate();
}

Eigen::VectorXcd dft_prime(const Eigen::VectorXcd& x, Direction direction) {
    DftPlan plan(static_cast<int>(x.size()));
    return direction == Direction::forward ? plan.forward(x)
                                           : plan.inverse(x);
}

MubTransformer::MubTransformer(int d) : d_(d), plan_(d) {
    require_odd_prime(d);
    phases_.resize(d, d);
    for (int k = 2; k <= d + 1; ++k) {
        phases_.col(k - 2) = phase_diagonal(d, k).diag;
    }
}

Eigen::VectorXcd MubTransformer::analyze(const Eigen::VectorXcd& x,
                                         int k) const {
    if (x.size() != d_) throw std::invalid_argument("length mismatch");
    if (k < 1 || k > d_ + 1) throw std::out_of_range("base index out of range");
    if (k == 1) return x;
    if (k == 2) return plan_.forward(x);
    return plan_.forward(phases_.col(k - 2).conjugate().cwiseProduct(x));
}

Eigen::VectorXcd MubTransformer::synthesize(const Eigen::VectorXcd& s,
                                            int k) const {
    if (s.size() != d_) throw std::invalid_argument("length mismatch");
    if (k < 1 || k > d_ + 1) throw std::out_of_range("base index out of range");
    if (k == 1) return s;
    if (k == 2) return plan_.inverse(s);
    return phases_.col(k - 2).cwiseProduct(plan_.inverse(s));
}

std::vector<Eigen::VectorXcd>
MubTransformer::analyze_all(const Eigen::VectorXcd& x) const {
    std::vector<Eigen::VectorXcd> spectra;
    spectra.reserve(d_ + 1);
    for (int k = 1; k <= d_ + 1; ++k) spectra.push_back(analyze(x, k));
    return spectra;
}

Eigen::VectorXcd mub_analyze_naive(const MubFamily& family,
                                   const Eigen::VectorXcd& x, int k) {
    if (x.size() != family.dim()) throw std::invalid_argument("length mismatch");
    return family.base(k).adjoint() * x;
}

Eigen::VectorXcd mub_synthesize_naive(const MubFamily& family,
                                      const Eigen::VectorXcd& s, int k) {
    if (s.size() != family.dim()) throw std::invalid_argument("length mismatch");
    return family.base(k) * s;
}

} // namespace mubsa
