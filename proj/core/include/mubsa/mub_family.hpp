#ifndef MUBSA_MUB_FAMILY_HPP
#define MUBSA_MUB_FAMILY_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace mubsa {

/// A maximal family of mutually unbiased bases of C^d.
///
/// Bases are indexed 1..d+1. Base 1 is the standard (identity) basis and
/// base 2 is the unitary DFT. For odd prime d the remaining bases are
/// quadratic-phase modulations of the DFT, so every cross-basis inner
/// product has modulus 1/sqrt(d).
///
/// Storage is one contiguous d x (d+1)d block (bases side by side), which
/// keeps the pairwise verification a strided matrix product.
class MubFamily {
public:
    /// Construct the d+1 bases for odd prime d.
    /// Entry (j,r) of base k>=2 is W^(r*j + (k-2)*(j^2-j)/2) / sqrt(d)
    /// with W = exp(2*pi*i/d) and zero-based j, r.
    /// Throws std::invalid_argument when d is not an odd prime.
    static MubFamily build(int d);

    /// Wrap externally supplied bases (no unbiasedness check; use
    /// verify_mub to measure). All matrices must be d x d and the list
    /// must have d+1 entries.
    static MubFamily from_bases(const std::vector<Eigen::MatrixXcd>& bases);

    int dim() const { return d_; }
    int base_count() const { return d_ + 1; }

    /// Primitive root of unity used by the construction.
    std::complex<double> root() const { return root_; }

    using BaseView = Eigen::Block<const Eigen::MatrixXcd, Eigen::Dynamic,
                                  Eigen::Dynamic, true>;

    /// Base k, 1-based; columns are the basis vectors.
    BaseView base(int k) const;

    /// Column r (0-based) of base k.
    Eigen::MatrixXcd::ConstColXpr base_column(int k, int r) const;

    /// All bases side by side, d x (d+1)*d.
    const Eigen::MatrixXcd& stacked() const { return stacked_; }

private:
    MubFamily(int d, Eigen::MatrixXcd stacked);

    int d_ = 0;
    std::complex<double> root_{1.0, 0.0};
    Eigen::MatrixXcd stacked_;
};

/// Deviation measurements for a basis family.
struct MubVerifyReport {
    double unitarity_deviation = 0.0;    // max |(M_k^H M_k - I)_{ij}|
    double unbiasedness_deviation = 0.0; // max | |(M_a^H M_b)_{ij}| - 1/sqrt(d) |
    double tolerance = 0.0;
    bool unitary_ok = false;
    bool unbiased_ok = false;

    bool pass() const { return unitary_ok && unbiased_ok; }
    double max_deviation() const {
        return unitarity_deviation > unbiasedness_deviation
                   ? unitarity_deviation
                   : unbiasedness_deviation;
    }
};

/// Measure worst-case unitarity and unbiasedness over every base pair.
MubVerifyReport verify_mub(const MubFamily& family, double tol);

} // namespace mubsa

#endif // MUBSA_MUB_FAMILY_HPP
