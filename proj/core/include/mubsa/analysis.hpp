#ifndef MUBSA_ANALYSIS_HPP
#define MUBSA_ANALYSIS_HPP

#include "mubsa/mub_family.hpp"
#include "mubsa/rng.hpp"
#include "mubsa/spectra.hpp"

#include <Eigen/Dense>
#include <vector>

namespace mubsa {

/// Entropy of spectrum k: sum over entries of -lg(entry/trace), base-2.
/// A zero entry yields +infinity; negative entries within the spectra
/// tolerance count as zero, anything lower is rejected.
double spectrum_entropy(const CompleteSpectra& spectra, int k);

struct EntropyReport {
    Eigen::VectorXd per_spectrum; // E_1 .. E_{d+1}
    double complete_entropy = 0.0;
    double flat_reference = 0.0; // d * lg(d), the flat-spectrum value
};

EntropyReport entropy_report(const CompleteSpectra& spectra);

/// Flags spectrum k when |E_k - d*lg(d)| exceeds the threshold. The
/// deviation is measured two-sided around the flat reference even though
/// the low side cannot occur for exact spectra.
struct DetectionReport {
    std::vector<bool> flags;
    std::vector<double> deviations;
    bool any = false;
};

DetectionReport detect_signal(const CompleteSpectra& spectra,
                              double per_spectrum_threshold);

/// Unit vector uniform on the complex sphere of C^d.
Eigen::VectorXcd uniform_sphere_sample(int d, RandomSource& rng);

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// usual diagonal phase correction.
Eigen::MatrixXcd haar_unitary_sample(int d, RandomSource& rng);

struct CompressionResult {
    int base_index = 0;
    Eigen::VectorXcd spectrum;
    double merit = 0.0; // max |spectrum entry|
    int side_information_bits = 0;
};

/// Pick the candidate base whose spectrum of x has the largest entry.
/// The candidate list must be nonempty; callers wanting the whole family
/// pass 1..d+1.
CompressionResult best_base_compress(const Eigen::VectorXcd& x,
                                     const MubFamily& family,
                                     const std::vector<int>& candidate_bases);

struct MubVsHaarReport {
    int d = 0;
    int bases = 0;
    int trials = 0;
    double threshold = 0.0; // sqrt(d / (2d + 1 - 2 sqrt(d)))
    double p_mub = 0.0;
    double p_haar = 0.0;
    double ci_mub = 0.0;  // 1.96 binomial standard errors
    double ci_haar = 0.0;
    double mean_mub = 0.0;
    double mean_haar = 0.0;
    double se_mub = 0.0;
    double se_haar = 0.0;
};

/// Monte Carlo comparison of the largest spectrum entry over k fixed
/// unbiased bases versus k fresh Haar bases per trial, on uniform sphere
/// vectors. Threshold exceedance carries confidence intervals; the
/// expectation comparison is reported with standard errors only.
MubVsHaarReport mub_vs_random_experiment(int d, int k_bases, int trials,
                                         RandomSource& rng);

} // namespace mubsa

#endif // MUBSA_ANALYSIS_HPP
