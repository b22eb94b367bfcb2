#include "mubsa/spectra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mubsa {
namespace {

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Eigen::MatrixXcd assemble(const CompleteSpectra& spectra,
                          const MubFamily& family) {
    const int d = spectra.d;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 1; k <= d + 1; ++k) {
        const auto m = family.base(k);
        sum.noalias() +=
            m * spectra.vectors.row(k - 1).asDiagonal() * m.adjoint();
    }
    sum -= spectra.trace * Eigen::MatrixXcd::Identity(d, d);
    return sum;
}

} // namespace

CorrelationMatrix CorrelationMatrix::checked(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument("correlation matrix must be square");
    }
    const double tr = m.trace().real();
    const double scale = std::max(1.0, std::abs(tr));
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("matrix is not Hermitian");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, i).real() < -1e-9 * scale) {
            throw std::invalid_argument("negative diagonal entry");
        }
    }
    if (min_eigenvalue(m) < -1e-9 * scale) {
        throw std::invalid_argument("matrix is not positive semidefinite");
    }
    return CorrelationMatrix{std::move(m), tr};
}

std::string CompleteSpectra::invariant_violation() const {
    const double scale = std::max(1.0, std::abs(trace));
    if (vectors.rows() != d + 1 || vectors.cols() != d) {
        return "spectra must hold d+1 vectors of length d";
    }
    if (vectors.minCoeff() < -1e-9 * scale) {
        return "negative spectrum entry";
    }
    for (int k = 0; k <= d; ++k) {
        if (std::abs(vectors.row(k).sum() - trace) > 1e-8 * scale) {
            return "spectrum " + std::to_string(k + 1) +
                   " does not sum to the trace";
        }
    }
    return {};
}

CompleteSpectra spectra_of(const CorrelationMatrix& rx,
                           const MubFamily& family) {
    const int d = family.dim();
    if (rx.dim() != d) throw std::invalid_argument("dimension mismatch");

    CompleteSpectra spectra;
    spectra.d = d;
    spectra.trace = rx.trace;
    spectra.vectors.resize(d + 1, d);

    const double residue_tol = 1e-10 * std::max(1.0, std::abs(rx.trace));
    Eigen::MatrixXcd tmp(d, d);
    for (int k = 1; k <= d + 1; ++k) {
        const auto m = family.base(k);
        tmp.noalias() = rx.entries * m;
        // (S_k)_s = col_s(M)^H * Rx * col_s(M)
        const Eigen::VectorXcd diag =
            (m.conjugate().cwiseProduct(tmp)).colwise().sum();
        if (diag.imag().cwiseAbs().maxCoeff() > residue_tol) {
            throw std::invalid_argument(
                "spectrum has non-real entries; input is not Hermitian");
        }
        spectra.vectors.row(k - 1) = diag.real();
    }
    const std::string violation = spectra.invariant_violation();
    if (!violation.empty()) throw std::invalid_argument(violation);
    return spectra;
}

Reconstruction reconstruct(const CompleteSpectra& spectra,
                           const MubFamily& family) {
    if (spectra.d != family.dim()) {
        throw std::invalid_argument("dimension mismatch");
    }
    Reconstruction result;
    result.matrix = assemble(spectra, family);
    result.min_eigenvalue = min_eigenvalue(result.matrix);
    result.psd = result.min_eigenvalue >=
                 -1e-8 * std::max(1.0, std::abs(spectra.trace));
    return result;
}

CompleteSpectra shift_spectra(const CompleteSpectra& spectra,
                              const Eigen::VectorXd& shifts) {
    if (shifts.size() != spectra.d + 1) {
        throw std::invalid_argument("one shift per spectrum required");
    }
    CompleteSpectra out = spectra;
    out.vectors.colwise() += shifts; // declared trace left unchanged
    return out;
}

CompleteSpectra flat_replace(const CompleteSpectra& spectra, int index) {
    if (index < 1 || index > spectra.d + 1) {
        throw std::out_of_range("base index out of range");
    }
    CompleteSpectra out = spectra;
    out.vectors.row(index - 1).setConstant(spectra.trace / spectra.d);
    return out;
}

UncertaintyReport check_spectral_uncertainty(const CompleteSpectra& spectra) {
    const int d = spectra.d;
    const Eigen::VectorXd maxima = spectra.vectors.rowwise().maxCoeff();
    UncertaintyReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= d + 1; ++i) {
        const double bound =
            std::sqrt(2.0) * std::sqrt(std::max(0.0, 1.0 - maxima[i - 1])) +
            1.0 / d;
        for (int j = 1; j <= d + 1; ++j) {
            if (i == j) continue;
            const double slack = bound - maxima[j - 1];
            if (slack < report.min_slack) {
                report.min_slack = slack;
                report.worst_i = i;
                report.worst_j = j;
            }
        }
    }
    report.pass = report.min_slack > 0.0;
    return report;
}

namespace {

// Deterministic Hermitian pattern with |entries| <= amp.
Eigen::MatrixXcd hermitian_pattern(int d, double amp, RandomSource& rng) {
    Eigen::MatrixXcd e(d, d);
    for (int i = 0; i < d; ++i) {
        e(i, i) = amp * (2.0 * rng.uniform01() - 1.0);
        for (int j = i + 1; j < d; ++j) {
            const double r = amp * rng.uniform01();
            const double phase = rng.uniform(0.0, 6.283185307179586);
            e(i, j) = std::polar(r, phase);
            e(j, i) = std::conj(e(i, j));
        }
    }
    return e;
}

// Hermitian error with independent zero-mean entries of variance v in the
// upper triangle (complex off-diagonal, real diagonal).
Eigen::MatrixXcd hermitian_noise(int d, double v, RandomSource& rng) {
    Eigen::MatrixXcd e(d, d);
    const double s = std::sqrt(v);
    for (int i = 0; i < d; ++i) {
        e(i, i) = s * rng.gaussian();
        for (int j = i + 1; j < d; ++j) {
            e(i, j) = std::complex<double>(s * rng.gaussian() / std::sqrt(2.0),
                                           s * rng.gaussian() / std::sqrt(2.0));
            e(j, i) = std::conj(e(i, j));
        }
    }
    return e;
}

Eigen::MatrixXd raw_spectra_of(const Eigen::MatrixXcd& m,
                               const MubFamily& family) {
    const int d = family.dim();
    Eigen::MatrixXd rows(d + 1, d);
    Eigen::MatrixXcd tmp(d, d);
    for (int k = 1; k <= d + 1; ++k) {
        const auto b = family.base(k);
        tmp.noalias() = m * b;
        rows.row(k - 1) =
            (b.conjugate().cwiseProduct(tmp)).colwise().sum().real();
    }
    return rows;
}

} // namespace

SensitivityReport sensitivity_experiment(const CorrelationMatrix& rx,
                                         PerturbationMode mode, double epsilon,
                                         int trials, RandomSource& rng,
                                         const MubFamily& family) {
    const int d = family.dim();
    if (rx.dim() != d) throw std::invalid_argument("dimension mismatch");
    if (trials < 1) throw std::invalid_argument("at least one trial");

    SensitivityReport report;
    report.mode = mode;
    report.epsilon = epsilon;
    report.trials = trials;

    const Eigen::MatrixXd base_spectra = raw_spectra_of(rx.entries, family);

    switch (mode) {
    case PerturbationMode::deterministic_matrix: {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            const Eigen::MatrixXcd e = hermitian_pattern(d, 0.9 * epsilon, rng);
            const Eigen::MatrixXd err =
                raw_spectra_of(rx.entries + e, family) - base_spectra;
            worst = std::max(worst, err.cwiseAbs().maxCoeff());
        }
        const double bound = d * epsilon;
        report.worst_ratio = bound > 0.0 ? worst / bound : worst;
        report.pass = epsilon == 0.0 ? worst == 0.0 : worst < bound;
        break;
    }
    case PerturbationMode::deterministic_spectra: {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            // zero-sum per spectrum keeps the perturbed set consistent
            // with a single perturbed matrix
            Eigen::MatrixXd es(d + 1, d);
            for (int k = 0; k <= d; ++k) {
                Eigen::VectorXd v(d);
                for (int j = 0; j < d; ++j) v[j] = 2.0 * rng.uniform01() - 1.0;
                v.array() -= v.mean();
                const double norm = v.cwiseAbs().maxCoeff();
                if (norm > 0.0) v *= 0.9 * epsilon / norm;
                es.row(k) = v;
            }
            Eigen::MatrixXcd er = Eigen::MatrixXcd::Zero(d, d);
            for (int k = 1; k <= d + 1; ++k) {
                const auto m = family.base(k);
                er.noalias() += m * es.row(k - 1).asDiagonal() * m.adjoint();
            }
            worst = std::max(worst, er.cwiseAbs().maxCoeff());
        }
        const double bound = d * epsilon;
        report.worst_ratio = bound > 0.0 ? worst / bound : worst;
        report.pass = epsilon == 0.0 ? worst == 0.0 : worst < bound;
        break;
    }
    case PerturbationMode::random_matrix:
    case PerturbationMode::random_spectra: {
        const bool on_matrix = mode == PerturbationMode::random_matrix;
        // Input variance sits below epsilon with room for the diagonal
        // accumulation in the spectra->matrix direction.
        const double v = (on_matrix ? 0.9 : 0.45) * epsilon;
        // random_matrix mode observes the (d+1) x d real spectra error;
        // random_spectra mode observes the matrix error, tracked as the
        // d x 2d block [Re | Im] so complex entry variance is re + im.
        const int rows = d + (on_matrix ? 1 : 0);
        const int cols = on_matrix ? d : 2 * d;
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
        Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(rows, cols);
        for (int t = 0; t < trials; ++t) {
            Eigen::MatrixXd err(rows, cols);
            if (on_matrix) {
                const Eigen::MatrixXcd e = hermitian_noise(d, v, rng);
                err = raw_spectra_of(rx.entries + e, family) - base_spectra;
            } else {
                Eigen::MatrixXd es(d + 1, d);
                const double s = std::sqrt(v);
                for (int k = 0; k <= d; ++k)
                    for (int j = 0; j < d; ++j) es(k, j) = s * rng.gaussian();
                Eigen::MatrixXcd er = Eigen::MatrixXcd::Zero(d, d);
                for (int k = 1; k <= d + 1; ++k) {
                    const auto m = family.base(k);
                    er.noalias() +=
                        m * es.row(k - 1).asDiagonal() * m.adjoint();
                }
                err.leftCols(d) = er.real();
                err.rightCols(d) = er.imag();
            }
            sum += err;
            sum_sq += err.cwiseProduct(err);
        }
        const Eigen::MatrixXd mean = sum / trials;
        const Eigen::MatrixXd var =
            (sum_sq / trials - mean.cwiseProduct(mean)).cwiseMax(0.0);
        double worst_z = 0.0;
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const double se =
                    std::sqrt(var(i, j) / std::max(1, trials - 1));
                if (se > 0.0) {
                    worst_z =
                        std::max(worst_z, std::abs(mean(i, j)) / (3.0 * se));
                }
            }
        }
        double worst_var = 0.0;
        if (on_matrix) {
            worst_var = var.maxCoeff();
        } else {
            // complex entry variance = var(re) + var(im)
            worst_var =
                (var.leftCols(d) + var.rightCols(d)).maxCoeff();
        }
        report.worst_mean_z = worst_z;
        report.worst_variance_ratio = epsilon > 0.0 ? worst_var / epsilon : 0.0;
        report.pass = (epsilon == 0.0 && worst_var == 0.0) ||
                      (worst_z <= 1.0 && worst_var < epsilon);
        break;
    }
    }
    return report;
}

} // namespace mubsa
