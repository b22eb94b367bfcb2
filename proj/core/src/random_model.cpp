#include "mubsa/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mubsa {
namespace {

void fill_source(Eigen::MatrixXd& y, const Eigen::VectorXd& sigma,
                 SourceDistribution dist, RandomSource& rng) {
    // column-major draw order: sample by sample
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
            const double draw = dist == SourceDistribution::rademacher
                                    ? rng.rademacher()
                                    : rng.gaussian();
            y(r, c) = sigma[r] * draw;
        }
    }
}

} // namespace

Eigen::MatrixXcd synthesize_from_spectra(const CompleteSpectra& spectra,
                                         const MubFamily& family, int count,
                                         SourceDistribution dist,
                                         RandomSource& rng) {
    const int d = family.dim();
    if (spectra.d != d) throw std::invalid_argument("dimension mismatch");
    if (count < 1) throw std::invalid_argument("sample count must be positive");
    if (std::abs(spectra.trace - 1.0) > 1e-8) {
        throw std::invalid_argument("synthesis requires trace 1");
    }
    const double floor = 1.0 / (d + 1);
    for (int k = 1; k <= d + 1; ++k) {
        for (int j = 0; j < d; ++j) {
            if (spectra.vectors(k - 1, j) < floor - 1e-12) {
                throw std::invalid_argument(
                    "spectrum entry (" + std::to_string(k) + "," +
                    std::to_string(j + 1) + ") = " +
                    std::to_string(spectra.vectors(k - 1, j)) +
                    " is below the synthesis floor 1/(d+1)");
            }
        }
    }

    Eigen::MatrixXcd samples = Eigen::MatrixXcd::Zero(d, count);
    Eigen::MatrixXd y(d, count);
    for (int k = 1; k <= d + 1; ++k) {
        Eigen::VectorXd sigma(d);
        for (int j = 0; j < d; ++j) {
            sigma[j] =
                std::sqrt(std::max(0.0, spectra.vectors(k - 1, j) - floor));
        }
        RandomSource stream = rng.substream(static_cast<std::uint64_t>(k));
        fill_source(y, sigma, dist, stream);
        samples.noalias() += family.base(k) * y;
    }
    return samples;
}

Eigen::MatrixXcd domain_vector_samples(const DomainVectorSpec& spec,
                                       const MubFamily& family, int count,
                                       SourceDistribution dist,
                                       RandomSource& rng) {
    const int d = family.dim();
    if (spec.variances.size() != d) {
        throw std::invalid_argument("one variance per coordinate required");
    }
    if (spec.variances.minCoeff() < 0.0) {
        throw std::invalid_argument("variances must be nonnegative");
    }
    if (spec.base_index < 1 || spec.base_index > d + 1) {
        throw std::out_of_range("base index out of range");
    }
    if (count < 1) throw std::invalid_argument("sample count must be positive");
    Eigen::MatrixXd y(d, count);
    fill_source(y, spec.variances.cwiseSqrt(), dist, rng);
    return family.base(spec.base_index) * y;
}

CompleteSpectra whiten_lift(const CompleteSpectra& spectra) {
    CompleteSpectra out = spectra;
    out.vectors = (spectra.vectors.array() + 1.0) / (spectra.d + 1);
    out.trace = (spectra.trace + spectra.d) / (spectra.d + 1);
    return out;
}

StationarityClass stationarity_class(const CompleteSpectra& spectra,
                                     double tol) {
    StationarityClass cls;
    const double flat = spectra.trace / spectra.d;
    for (int k = 1; k <= spectra.d + 1; ++k) {
        const double dev =
            (spectra.vectors.row(k - 1).array() - flat).abs().maxCoeff();
        if (dev <= tol) cls.indices.push_back(k);
    }
    return cls;
}

Eigen::MatrixXcd stabilize(const Eigen::MatrixXcd& samples,
                           const std::vector<int>& indices,
                           const MubFamily& family, RandomSource& rng) {
    const int d = family.dim();
    if (samples.rows() != d) throw std::invalid_argument("dimension mismatch");
    if (indices.empty()) {
        throw std::invalid_argument("stabilizer needs at least one index");
    }
    std::vector<bool> listed(d + 2, false);
    for (int k : indices) {
        if (k < 1 || k > d + 1) throw std::out_of_range("base index out of range");
        listed[k] = true;
    }
    if (static_cast<int>(indices.size()) >= d + 1) {
        throw std::invalid_argument(
            "stabilizing every base leaves an empty operator");
    }

    const Eigen::Index count = samples.cols();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, count);
    Eigen::MatrixXcd work(d, count);
    for (int j = 1; j <= d + 1; ++j) {
        if (listed[j]) continue;
        work.noalias() = family.base(j).adjoint() * samples;
        RandomSource stream = rng.substream(static_cast<std::uint64_t>(j));
        for (Eigen::Index c = 0; c < count; ++c) {
            for (int r = 0; r < d; ++r) {
                work(r, c) *= stream.rademacher();
            }
        }
        out.noalias() += family.base(j) * work;
    }
    return out;
}

Eigen::MatrixXd stabilized_spectra_prediction(const CompleteSpectra& input,
                                              const std::vector<int>& indices) {
    const int d = input.d;
    const int k = static_cast<int>(indices.size());
    std::vector<bool> listed(d + 2, false);
    for (int i : indices) listed[i] = true;

    Eigen::MatrixXd predicted(d + 1, d);
    for (int t = 1; t <= d + 1; ++t) {
        if (listed[t]) {
            predicted.row(t - 1).setConstant(input.trace * (d - k + 1) /
                                             static_cast<double>(d));
        } else {
            predicted.row(t - 1) =
                input.vectors.row(t - 1).array() +
                input.trace * (d - k) / static_cast<double>(d);
        }
    }
    return predicted;
}

OperatorCharacterization characterize_operator(const RandomOperator& op,
                                               const MubFamily& family,
                                               int samples_per_probe,
                                               RandomSource& rng) {
    const int d = family.dim();
    if (samples_per_probe < 2) {
        throw std::invalid_argument("need at least two samples per probe");
    }

    OperatorCharacterization ch;
    ch.d = d;
    ch.D.assign(d + 1, Eigen::MatrixXd::Zero(d, d * (d + 1)));
    ch.std_err.assign(d + 1, Eigen::MatrixXd::Zero(d, d * (d + 1)));

    Eigen::MatrixXcd probe(d, samples_per_probe);
    for (int i = 1; i <= d + 1; ++i) {
        for (int j = 0; j < d; ++j) {
            RandomSource stream = rng.substream(
                static_cast<std::uint64_t>((i - 1) * d + j));
            const Eigen::VectorXcd direction = family.base_column(i, j);
            for (int c = 0; c < samples_per_probe; ++c) {
                probe.col(c) = direction * stream.rademacher();
            }
            RandomSource op_stream = stream.substream(0x0bea7ull);
            const Eigen::MatrixXcd outputs = op(probe, op_stream);
            if (outputs.rows() != d || outputs.cols() != samples_per_probe) {
                throw std::runtime_error("operator changed the batch shape");
            }
            Eigen::MatrixXd spectra, err;
            empirical_spectra_with_errors(outputs, family, spectra, err);
            const int col = OperatorCharacterization::column_index(d, i, j);
            for (int k = 0; k <= d; ++k) {
                ch.D[k].col(col) = spectra.row(k);
                ch.std_err[k].col(col) = err.row(k);
            }
        }
    }
    return ch;
}

SpectraPrediction predict_output_spectra(const OperatorCharacterization& ch,
                                         const CompleteSpectra& spectra) {
    const int d = ch.d;
    if (spectra.d != d) throw std::invalid_argument("dimension mismatch");
    if (std::abs(spectra.trace - 1.0) > 1e-8) {
        throw std::invalid_argument("prediction requires trace 1");
    }
    Eigen::VectorXd shifted(d * (d + 1));
    for (int i = 0; i <= d; ++i) {
        shifted.segment(i * d, d) =
            spectra.vectors.row(i).array() - 1.0 / (d + 1);
    }
    SpectraPrediction pred;
    pred.vectors.resize(d + 1, d);
    pred.std_err.resize(d + 1, d);
    for (int k = 0; k <= d; ++k) {
        pred.vectors.row(k) = (ch.D[k] * shifted).transpose();
        pred.std_err.row(k) =
            (ch.std_err[k].cwiseProduct(ch.std_err[k]) *
             shifted.cwiseProduct(shifted))
                .cwiseSqrt()
                .transpose();
    }
    return pred;
}

namespace {

struct BlockFit {
    double ones_residual;   // against mu * all-ones
    double ones_mu;
    double id_residual;     // against mu * identity
    double id_mu;
};

BlockFit fit_block(const Eigen::MatrixXd& block) {
    BlockFit fit;
    fit.ones_mu = block.mean();
    fit.ones_residual =
        (block.array() - fit.ones_mu).abs().maxCoeff();
    fit.id_mu = block.diagonal().mean();
    double res = (block.diagonal().array() - fit.id_mu).abs().maxCoeff();
    const int d = static_cast<int>(block.rows());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i != j) res = std::max(res, std::abs(block(i, j)));
        }
    }
    fit.id_residual = res;
    return fit;
}

} // namespace

OperatorClassification classify_operator(const OperatorCharacterization& ch,
                                         double tol) {
    const int d = ch.d;
    if (tol <= 0.0) {
        double max_se = 0.0;
        for (const auto& se : ch.std_err) {
            max_se = std::max(max_se, se.maxCoeff());
        }
        tol = std::max(4.0 * max_se, 1e-9);
    }
    OperatorClassification cls;
    cls.stationarizing.assign(d + 1, false);
    cls.switch_source.assign(d + 1, 0);

    for (int k = 0; k <= d; ++k) {
        bool all_ones = true;
        int id_at = 0;
        bool others_ones = true;
        for (int i = 1; i <= d + 1; ++i) {
            const Eigen::MatrixXd block = ch.D[k].middleCols((i - 1) * d, d);
            const BlockFit fit = fit_block(block);
            const bool ones_ok = fit.ones_residual <= tol;
            const bool id_ok =
                fit.id_residual <= tol && std::abs(fit.id_mu) > tol;
            if (!ones_ok) all_ones = false;
            if (id_ok && !ones_ok) {
                if (id_at == 0) {
                    id_at = i;
                } else {
                    id_at = -1; // more than one identity block
                }
            } else if (!ones_ok) {
                others_ones = false;
            }
        }
        cls.stationarizing[k] = all_ones;
        if (id_at > 0 && others_ones) cls.switch_source[k] = id_at;
    }

    // A filter that only touches spectrum j passes every other spectrum
    // through: identity block at position k for all k != j.
    for (int j = 1; j <= d + 1; ++j) {
        bool ok = true;
        for (int k = 1; k <= d + 1; ++k) {
            if (k == j) continue;
            if (cls.switch_source[k - 1] != k) {
                ok = false;
                break;
            }
        }
        if (ok) cls.untouched_filter_targets.push_back(j);
    }
    return cls;
}

Eigen::MatrixXd empirical_spectra(const Eigen::MatrixXcd& samples,
                                  const MubFamily& family) {
    Eigen::MatrixXd spectra, err;
    empirical_spectra_with_errors(samples, family, spectra, err);
    return spectra;
}

void empirical_spectra_with_errors(const Eigen::MatrixXcd& samples,
                                   const MubFamily& family,
                                   Eigen::MatrixXd& spectra,
                                   Eigen::MatrixXd& std_err) {
    const int d = family.dim();
    const Eigen::Index n = samples.cols();
    if (samples.rows() != d) throw std::invalid_argument("dimension mismatch");
    if (n < 2) throw std::invalid_argument("need at least two samples");

    spectra.resize(d + 1, d);
    std_err.resize(d + 1, d);
    Eigen::MatrixXcd transformed(d, n);
    for (int k = 1; k <= d + 1; ++k) {
        transformed.noalias() = family.base(k).adjoint() * samples;
        const Eigen::ArrayXXd sq = transformed.cwiseAbs2().array();
        const Eigen::ArrayXd mean = sq.rowwise().mean();
        const Eigen::ArrayXd var =
            (sq.colwise() - mean).square().rowwise().sum() /
            static_cast<double>(n - 1);
        spectra.row(k - 1) = mean.transpose();
        std_err.row(k - 1) =
            (var / static_cast<double>(n)).sqrt().transpose();
    }
}

Eigen::MatrixXcd empirical_correlation(const Eigen::MatrixXcd& samples) {
    const Eigen::Index n = samples.cols();
    if (n < 1) throw std::invalid_argument("need samples");
    return (samples * samples.adjoint()) / static_cast<double>(n);
}

} // namespace mubsa
