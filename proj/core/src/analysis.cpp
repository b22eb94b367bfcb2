#include "mubsa/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mubsa {

double spectrum_entropy(const CompleteSpectra& spectra, int k) {
    if (k < 1 || k > spectra.d + 1) {
        throw std::out_of_range("base index out of range");
    }
    if (spectra.trace <= 0.0) {
        throw std::invalid_argument("entropy needs a positive trace");
    }
    const double floor = -1e-9 * std::max(1.0, spectra.trace);
    double sum = 0.0;
    for (int j = 0; j < spectra.d; ++j) {
        const double v = spectra.vectors(k - 1, j);
        if (v < floor) {
            throw std::invalid_argument("spectrum entry below tolerance");
        }
        if (v <= 0.0) return std::numeric_limits<double>::infinity();
        sum -= std::log2(v / spectra.trace);
    }
    return sum;
}

EntropyReport entropy_report(const CompleteSpectra& spectra) {
    EntropyReport report;
    report.per_spectrum.resize(spectra.d + 1);
    for (int k = 1; k <= spectra.d + 1; ++k) {
        report.per_spectrum[k - 1] = spectrum_entropy(spectra, k);
    }
    report.complete_entropy = report.per_spectrum.sum();
    report.flat_reference = spectra.d * std::log2(double(spectra.d));
    return report;
}

DetectionReport detect_signal(const CompleteSpectra& spectra,
                              double per_spectrum_threshold) {
    const EntropyReport entropy = entropy_report(spectra);
    DetectionReport report;
    report.flags.resize(spectra.d + 1);
    report.deviations.resize(spectra.d + 1);
    for (int k = 0; k <= spectra.d; ++k) {
        const double dev =
            std::abs(entropy.per_spectrum[k] - entropy.flat_reference);
        report.deviations[k] = dev;
        report.flags[k] = dev > per_spectrum_threshold;
        report.any = report.any || report.flags[k];
    }
    return report;
}

Eigen::VectorXcd uniform_sphere_sample(int d, RandomSource& rng) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    Eigen::VectorXcd x(d);
    for (int i = 0; i < d; ++i) {
        x[i] = std::complex<double>(rng.gaussian(), rng.gaussian());
    }
    const double norm = x.norm();
    if (norm == 0.0) return uniform_sphere_sample(d, rng);
    return x / norm;
}

Eigen::MatrixXcd haar_unitary_sample(int d, RandomSource& rng) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    Eigen::MatrixXcd g(d, d);
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
            g(r, c) = std::complex<double>(rng.gaussian(), rng.gaussian());
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phase ambiguity so the law is exactly Haar
    for (int c = 0; c < d; ++c) {
        const std::complex<double> diag = r(c, c);
        const double mag = std::abs(diag);
        if (mag > 0.0) q.col(c) *= diag / mag;
    }
    return q;
}

CompressionResult best_base_compress(const Eigen::VectorXcd& x,
                                     const MubFamily& family,
                                     const std::vector<int>& candidate_bases) {
    const int d = family.dim();
    if (x.size() != d) throw std::invalid_argument("dimension mismatch");
    if (candidate_bases.empty()) {
        throw std::invalid_argument("candidate base list must not be empty");
    }
    CompressionResult best;
    best.merit = -1.0;
    for (int k : candidate_bases) {
        if (k < 1 || k > d + 1) {
            throw std::out_of_range("candidate base out of range");
        }
        Eigen::VectorXcd s = family.base(k).adjoint() * x;
        const double merit = s.cwiseAbs().maxCoeff();
        if (merit > best.merit) {
            best.merit = merit;
            best.base_index = k;
            best.spectrum = std::move(s);
        }
    }
    best.side_information_bits = static_cast<int>(
        std::ceil(std::log2(static_cast<double>(candidate_bases.size()))));
    return best;
}

MubVsHaarReport mub_vs_random_experiment(int d, int k_bases, int trials,
                                         RandomSource& rng) {
    if (k_bases < 1 || k_bases > d + 1) {
        throw std::invalid_argument("base count must lie in [1, d+1]");
    }
    if (trials < 1) throw std::invalid_argument("trials must be positive");

    const MubFamily family = MubFamily::build(d);
    MubVsHaarReport report;
    report.d = d;
    report.bases = k_bases;
    report.trials = trials;
    report.threshold =
        std::sqrt(d / (2.0 * d + 1.0 - 2.0 * std::sqrt(double(d))));

    long long exceed_mub = 0;
    long long exceed_haar = 0;
    double sum_mub = 0.0, sumsq_mub = 0.0;
    double sum_haar = 0.0, sumsq_haar = 0.0;

    RandomSource sphere_rng = rng.substream(1);
    RandomSource haar_rng = rng.substream(2);

    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXcd x = uniform_sphere_sample(d, sphere_rng);
        double m = 0.0;
        for (int k = 1; k <= k_bases; ++k) {
            m = std::max(m,
                         (family.base(k).adjoint() * x).cwiseAbs().maxCoeff());
        }
        double u = 0.0;
        for (int k = 0; k < k_bases; ++k) {
            const Eigen::MatrixXcd basis = haar_unitary_sample(d, haar_rng);
            u = std::max(u, (basis.adjoint() * x).cwiseAbs().maxCoeff());
        }
        if (m >= report.threshold) ++exceed_mub;
        if (u >= report.threshold) ++exceed_haar;
        sum_mub += m;
        sumsq_mub += m * m;
        sum_haar += u;
        sumsq_haar += u * u;
    }

    const double n = static_cast<double>(trials);
    report.p_mub = exceed_mub / n;
    report.p_haar = exceed_haar / n;
    report.ci_mub = 1.96 * std::sqrt(report.p_mub * (1.0 - report.p_mub) / n);
    report.ci_haar =
        1.96 * std::sqrt(report.p_haar * (1.0 - report.p_haar) / n);
    report.mean_mub = sum_mub / n;
    report.mean_haar = sum_haar / n;
    report.se_mub =
        std::sqrt(std::max(0.0, sumsq_mub / n - report.mean_mub * report.mean_mub) / n);
    report.se_haar = std::sqrt(
        std::max(0.0, sumsq_haar / n - report.mean_haar * report.mean_haar) / n);
    return report;
}

} // namespace mubsa
