#ifndef MUBSA_RANDOM_MODEL_HPP
#define MUBSA_RANDOM_MODEL_HPP

#include "mubsa/mub_family.hpp"
#include "mubsa/rng.hpp"
#include "mubsa/spectra.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace mubsa {

enum class SourceDistribution { rademacher, gaussian };

/// Prescribed per-coordinate variances seen from one base.
struct DomainVectorSpec {
    int base_index = 0;
    Eigen::VectorXd variances;
};

/// Samples of M_k Y for independent zero-mean Y with the prescribed
/// variances: the base's own spectrum equals the variance vector and
/// every other spectrum is flat in expectation. Columns are samples.
Eigen::MatrixXcd domain_vector_samples(const DomainVectorSpec& spec,
                                       const MubFamily& family, int count,
                                       SourceDistribution dist,
                                       RandomSource& rng);

/// Base indices whose spectra are flat within a tolerance.
struct StationarityClass {
    std::vector<int> indices;

    bool contains(int k) const {
        for (int i : indices)
            if (i == k) return true;
        return false;
    }
};

/// Draw samples of a random vector whose correlation matrix realizes the
/// given spectra, as a sum of d*(d+1) independent sources spread over the
/// bases. Requires trace 1 and min entry of every spectrum >= 1/(d+1);
/// violations are reported with the offending (base, coordinate). Columns
/// of the result are samples.
Eigen::MatrixXcd synthesize_from_spectra(const CompleteSpectra& spectra,
                                         const MubFamily& family, int count,
                                         SourceDistribution dist,
                                         RandomSource& rng);

/// Spectra of (X + N)/sqrt(d+1) for unit white noise N:
/// S_i -> (S_i + One)/(d+1). Output satisfies the synthesis floor.
CompleteSpectra whiten_lift(const CompleteSpectra& spectra);

/// All indices k with ||S_k - (trace/d) One||_inf <= tol.
StationarityClass stationarity_class(const CompleteSpectra& spectra,
                                     double tol);

/// Per-sample X' = sum over bases j outside `indices` of
/// M_j Ys M_j^H X with a fresh unit-variance sign diagonal Ys per
/// (sample, base). Flattens the listed spectra and lifts the others by a
/// constant. `indices` must be a nonempty proper subset of 1..d+1.
Eigen::MatrixXcd stabilize(const Eigen::MatrixXcd& samples,
                           const std::vector<int>& indices,
                           const MubFamily& family, RandomSource& rng);

/// Expected output spectra of the stabilizer, rows 1..d+1.
/// Listed indices become trace*(d-k+1)/d flat; the rest shift by
/// trace*(d-k)/d with k = |indices|.
Eigen::MatrixXd stabilized_spectra_prediction(const CompleteSpectra& input,
                                              const std::vector<int>& indices);

/// A random linear operator on samples: maps a d x count batch to a
/// d x count batch, drawing any internal randomness from the supplied
/// source (the operator's randomness must not depend on the input values).
using RandomOperator = std::function<Eigen::MatrixXcd(
    const Eigen::MatrixXcd& inputs, RandomSource& rng)>;

/// The d+1 real matrices, each d x (d^2+d), mapping shifted input spectra
/// to output spectra, with per-entry estimation standard errors.
struct OperatorCharacterization {
    int d = 0;
    std::vector<Eigen::MatrixXd> D;
    std::vector<Eigen::MatrixXd> std_err;

    static int column_index(int d, int i, int j) { return (i - 1) * d + j; }
};

/// Probe the operator with single-coordinate sources from every base and
/// estimate the response matrices by Monte Carlo.
OperatorCharacterization characterize_operator(const RandomOperator& op,
                                               const MubFamily& family,
                                               int samples_per_probe,
                                               RandomSource& rng);

/// Predicted output spectra (rows) and their standard errors for a
/// trace-1 input spectra set.
struct SpectraPrediction {
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd std_err;
};

SpectraPrediction predict_output_spectra(const OperatorCharacterization& ch,
                                         const CompleteSpectra& spectra);

/// Structural tags for a characterization: which output spectra are
/// forced flat, which input spectrum each output spectrum copies, and
/// which single spectra a filter touches while passing the rest through.
struct OperatorClassification {
    std::vector<bool> stationarizing;         // per base k (all-ones blocks)
    std::vector<int> switch_source;           // per base k; 0 when no match
    std::vector<int> untouched_filter_targets; // j with pass-through elsewhere
};

/// tol <= 0 selects the default of four times the largest estimation
/// standard error.
OperatorClassification classify_operator(const OperatorCharacterization& ch,
                                         double tol = 0.0);

/// Empirical spectra of a sample batch (columns are samples).
Eigen::MatrixXd empirical_spectra(const Eigen::MatrixXcd& samples,
                                  const MubFamily& family);

/// Empirical spectra together with per-entry standard errors.
void empirical_spectra_with_errors(const Eigen::MatrixXcd& samples,
                                   const MubFamily& family,
                                   Eigen::MatrixXd& spectra,
                                   Eigen::MatrixXd& std_err);

/// Empirical correlation matrix (1/N) X X^H of a sample batch.
Eigen::MatrixXcd empirical_correlation(const Eigen::MatrixXcd& samples);

} // namespace mubsa

#endif // MUBSA_RANDOM_MODEL_HPP
