#ifndef MUBSA_TRANSFORM_HPP
#define MUBSA_TRANSFORM_HPP

#include "mubsa/mub_family.hpp"

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace mubsa {

enum class Direction { forward, inverse };

/// Unit-modulus diagonal H_k with M_k = H_k * M_2.
struct PhaseDiagonal {
    int d = 0;
    int base_index = 0;
    Eigen::VectorXcd diag;
};

/// Diagonal factor for base k (2 <= k <= d+1), odd prime d.
/// h_j = W^((k-2)*(j^2-j)/2). Throws for k = 1 or out-of-range k.
PhaseDiagonal phase_diagonal(int d, int k);

/// DFT of a fixed length via the chirp-z reduction to a power-of-two
/// cyclic convolution, O(d log d) for any length including primes.
/// forward(x) = M_2^H x and inverse(s) = M_2 s in the unitary scaling.
class DftPlan {
public:
    explicit DftPlan(int length);

    int length() const { return d_; }

    Eigen::VectorXcd forward(const Eigen::VectorXcd& x) const;
    Eigen::VectorXcd inverse(const Eigen::VectorXcd& s) const;

private:
    void raw_forward(std::vector<std::complex<double>>& buf) const;

    int d_;
    int conv_size_;                               // power of two >= 2d-1
    double scale_;                                // 1/sqrt(d)
    std::vector<std::complex<double>> chirp_;     // exp(-i*pi*n^2/d)
    std::vector<std::complex<double>> kernel_fft_; // FFT of the chirp kernel
    std::vector<std::complex<double>> twiddle_;   // radix-2 twiddles
};

/// One-shot convenience around DftPlan.
Eigen::VectorXcd dft_prime(const Eigen::VectorXcd& x, Direction direction);

/// Fast analysis/synthesis in every base of the family for odd prime d,
/// built from the dimension alone: S_k = M_2^H (H_k^H x), x = H_k (M_2 s).
class MubTransformer {
public:
    explicit MubTransformer(int d);

    int dim() const { return d_; }

    /// S_k = M_k^H x; k = 1 returns x unchanged.
    Eigen::VectorXcd analyze(const Eigen::VectorXcd& x, int k) const;

    /// x = M_k s; k = 1 returns s unchanged.
    Eigen::VectorXcd synthesize(const Eigen::VectorXcd& s, int k) const;

    /// All d+1 spectra of x, row k-1 holding S_k.
    std::vector<Eigen::VectorXcd> analyze_all(const Eigen::VectorXcd& x) const;

private:
    int d_;
    DftPlan plan_;
    Eigen::MatrixXcd phases_; // column k-2 holds diag(H_k), k = 2..d+1
};

/// Reference paths: plain matrix products against the stored bases.
Eigen::VectorXcd mub_analyze_naive(const MubFamily& family,
                                   const Eigen::VectorXcd& x, int k);
Eigen::VectorXcd mub_synthesize_naive(const MubFamily& family,
                                      const Eigen::VectorXcd& s, int k);

} // namespace mubsa

#endif // MUBSA_TRANSFORM_HPP
