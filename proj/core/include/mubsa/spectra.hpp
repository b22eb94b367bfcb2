#ifndef MUBSA_SPECTRA_HPP
#define MUBSA_SPECTRA_HPP

#include "mubsa/mub_family.hpp"
#include "mubsa/rng.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mubsa {

/// Hermitian positive-semidefinite matrix with its trace on record.
/// Construct through checked() so the invariants are enforced once.
struct CorrelationMatrix {
    Eigen::MatrixXcd entries;
    double trace = 0.0;

    /// Validates Hermitian symmetry, a real nonnegative diagonal and
    /// positive semidefiniteness (eigenvalue margin -1e-9 * trace).
    /// Throws std::invalid_argument with the failing condition.
    static CorrelationMatrix checked(Eigen::MatrixXcd m);

    int dim() const { return static_cast<int>(entries.rows()); }
};

/// The d+1 real spectra of a correlation matrix, row k-1 holding S_k.
struct CompleteSpectra {
    int d = 0;
    double trace = 0.0;
    Eigen::MatrixXd vectors; // (d+1) x d

    Eigen::VectorXd spectrum(int k) const { return vectors.row(k - 1); }

    /// Entries >= -1e-9*trace and every row summing to trace
    /// within 1e-8*trace. Returns an empty string when satisfied.
    std::string invariant_violation() const;
};

/// S_k = diag(M_k^H Rx M_k) for every base. Imaginary residue above
/// 1e-10 * max(1, trace) is rejected; smaller residue is discarded.
CompleteSpectra spectra_of(const CorrelationMatrix& rx,
                           const MubFamily& family);

/// Result of assembling a matrix back from spectra. The assembly is
/// always Hermitian but need not be positive semidefinite: not every
/// nonnegative spectra set is realizable, so the eigenvalue margin is
/// reported instead of silently repaired.
struct Reconstruction {
    Eigen::MatrixXcd matrix;
    double min_eigenvalue = 0.0;
    bool psd = false;

    CorrelationMatrix to_correlation() const {
        return CorrelationMatrix::checked(matrix);
    }
};

/// Sum of M_i Diag(S_i) M_i^H minus trace * I.
Reconstruction reconstruct(const CompleteSpectra& spectra,
                           const MubFamily& family);

/// S_i' = S_i + u_i * One. Entries may go negative; no validation.
CompleteSpectra shift_spectra(const CompleteSpectra& spectra,
                              const Eigen::VectorXd& shifts);

/// Replace S_index by the flat spectrum (trace/d) * One. The result is
/// not always realizable: run it through reconstruct() and read the
/// eigenvalue margin. A pure state built from two columns of the
/// replaced base drives the margin down to 1/d - 1/2.
CompleteSpectra flat_replace(const CompleteSpectra& spectra, int index);

/// Worst margin of the pairwise bound
/// max(S_j) < sqrt(2)*sqrt(1 - max(S_i)) + 1/d over ordered pairs.
struct UncertaintyReport {
    double min_slack = 0.0;
    int worst_i = 0;
    int worst_j = 0;
    bool pass = false; // min_slack > 0
};

UncertaintyReport check_spectral_uncertainty(const CompleteSpectra& spectra);

enum class PerturbationMode {
    deterministic_matrix,  // entrywise error on Rx, bound d*eps on spectra
    random_matrix,         // random error on Rx, variance carries over
    deterministic_spectra, // entrywise error on spectra, bound d*eps on Rx
    random_spectra,        // random error on spectra, variance carries over
};

struct SensitivityReport {
    PerturbationMode mode{};
    double epsilon = 0.0;
    int trials = 0;
    // deterministic modes: worst measured error over its bound
    double worst_ratio = 0.0;
    // random modes: worst |empirical mean| in units of 3 standard errors,
    // and worst empirical variance over epsilon
    double worst_mean_z = 0.0;
    double worst_variance_ratio = 0.0;
    bool pass = false;
};

/// Empirical error-propagation check between the two representations.
SensitivityReport sensitivity_experiment(const CorrelationMatrix& rx,
                                         PerturbationMode mode, double epsilon,
                                         int trials, RandomSource& rng,
                                         const MubFamily& family);

} // namespace mubsa

#endif // MUBSA_SPECTRA_HPP
