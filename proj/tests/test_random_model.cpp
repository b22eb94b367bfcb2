#include "mubsa/random_model.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace mubsa;
using mubsa::test::random_psd;

namespace {

CompleteSpectra flat_spectra(int d) {
    CompleteSpectra s;
    s.d = d;
    s.trace = 1.0;
    s.vectors = Eigen::MatrixXd::Constant(d + 1, d, 1.0 / d);
    return s;
}

CompleteSpectra spike_spectra(int d, const MubFamily& family) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    m(0, 0) = 1.0;
    return spectra_of(CorrelationMatrix::checked(m), family);
}

} // namespace

TEST_CASE("random source determinism and substreams") {
    RandomSource a(123, 4), b(123, 4), c(123, 5);
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform01();
        CHECK(va == b.uniform01());
        CHECK(va != c.uniform01());
    }
    RandomSource r(9);
    RandomSource s1 = r.substream(1);
    RandomSource s2 = r.substream(1);
    CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("synthesis floor is enforced with the failing entry named") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    CompleteSpectra bad = flat_spectra(d);
    bad.vectors(1, 2) = 0.1; // below the floor 1/(d+1) = 0.25
    bad.vectors(1, 0) = 1.0 - bad.vectors(1, 1) - bad.vectors(1, 2);
    RandomSource rng(1);
    CHECK_THROWS_WITH_AS(
        synthesize_from_spectra(bad, family, 10,
                                SourceDistribution::rademacher, rng),
        doctest::Contains("(2,3)"), std::invalid_argument);
}

TEST_CASE("synthesized samples reproduce the target correlation") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);

    SUBCASE("flat spectra, both distributions") {
        for (SourceDistribution dist :
             {SourceDistribution::rademacher, SourceDistribution::gaussian}) {
            RandomSource rng(2 + static_cast<int>(dist));
            const Eigen::MatrixXcd samples = synthesize_from_spectra(
                flat_spectra(d), family, 60000, dist, rng);
            const Eigen::MatrixXcd emp = empirical_correlation(samples);
            CHECK((emp - Eigen::MatrixXcd::Identity(d, d) / double(d))
                      .cwiseAbs()
                      .maxCoeff() < 0.02);
        }
    }
    SUBCASE("lifted random spectra") {
        RandomSource seed_rng(3);
        const CompleteSpectra target =
            whiten_lift(spectra_of(random_psd(d, seed_rng), family));
        const Eigen::MatrixXcd expected = reconstruct(target, family).matrix;
        RandomSource rng(4);
        const Eigen::MatrixXcd samples = synthesize_from_spectra(
            target, family, 100000, SourceDistribution::rademacher, rng);
        const double err =
            (empirical_correlation(samples) - expected).cwiseAbs().maxCoeff();
        CHECK(err < 10.0 / std::sqrt(100000.0));
    }
    SUBCASE("dimension five, growing sample counts") {
        const int d5 = 5;
        const MubFamily fam5 = MubFamily::build(d5);
        RandomSource seed_rng(20);
        const CompleteSpectra target =
            whiten_lift(spectra_of(random_psd(d5, seed_rng), fam5));
        const Eigen::MatrixXcd expected = reconstruct(target, fam5).matrix;
        for (int n : {10000, 100000}) {
            RandomSource rng(21 + n);
            const Eigen::MatrixXcd samples = synthesize_from_spectra(
                target, fam5, n, SourceDistribution::rademacher, rng);
            CHECK((empirical_correlation(samples) - expected)
                      .cwiseAbs()
                      .maxCoeff() < 10.0 / std::sqrt(double(n)));
        }
    }
}

TEST_CASE("single-domain samples realize their variance spectrum") {
    const int d = 5;
    const MubFamily family = MubFamily::build(d);
    DomainVectorSpec spec;
    spec.base_index = 3;
    spec.variances = Eigen::VectorXd::Zero(d);
    spec.variances << 0.5, 0.2, 0.15, 0.1, 0.05;
    RandomSource rng(22);
    const Eigen::MatrixXcd samples = domain_vector_samples(
        spec, family, 60000, SourceDistribution::rademacher, rng);
    const Eigen::MatrixXd measured = empirical_spectra(samples, family);
    CHECK((measured.row(2).transpose() - spec.variances)
              .cwiseAbs()
              .maxCoeff() < 0.03);
    for (int t = 1; t <= d + 1; ++t) {
        if (t == 3) continue;
        CHECK((measured.row(t - 1).array() - 1.0 / d).abs().maxCoeff() < 0.03);
    }

    DomainVectorSpec bad = spec;
    bad.variances[0] = -0.1;
    CHECK_THROWS_AS(
        domain_vector_samples(bad, family, 4, SourceDistribution::rademacher,
                              rng),
        std::invalid_argument);
}

TEST_CASE("whitening lift lands exactly on the synthesis floor") {
    const int d = 5;
    const MubFamily family = MubFamily::build(d);

    const CompleteSpectra flat = flat_spectra(d);
    const CompleteSpectra lifted_flat = whiten_lift(flat);
    CHECK((lifted_flat.vectors.array() - 1.0 / d).abs().maxCoeff() < 1e-15);
    CHECK(lifted_flat.trace == doctest::Approx(1.0));

    const CompleteSpectra spiked = spike_spectra(d, family);
    const CompleteSpectra lifted = whiten_lift(spiked);
    CHECK(lifted.vectors.minCoeff() ==
          doctest::Approx(1.0 / (d + 1)).epsilon(1e-12));

    RandomSource rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const CompleteSpectra s =
            whiten_lift(spectra_of(random_psd(d, rng), family));
        CHECK(s.vectors.minCoeff() >= 1.0 / (d + 1) - 1e-12);
    }
}

TEST_CASE("stationarity classes of the standard examples") {
    const int d = 5;
    const MubFamily family = MubFamily::build(d);

    CHECK(stationarity_class(flat_spectra(d), 1e-9).indices ==
          std::vector<int>{1, 2, 3, 4, 5, 6});

    const StationarityClass spiked =
        stationarity_class(spike_spectra(d, family), 1e-9);
    CHECK(spiked.indices == std::vector<int>{2, 3, 4, 5, 6});
}

TEST_CASE("stabilizer rejects degenerate index sets") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    RandomSource rng(6);
    const Eigen::MatrixXcd samples = synthesize_from_spectra(
        flat_spectra(d), family, 16, SourceDistribution::rademacher, rng);
    CHECK_THROWS_AS(stabilize(samples, {}, family, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(stabilize(samples, {1, 2, 3, 4}, family, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(stabilize(samples, {9}, family, rng), std::out_of_range);
}

TEST_CASE("stabilizer output spectra follow the shift formulas") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    RandomSource seed_rng(7);
    const CompleteSpectra input =
        whiten_lift(spike_spectra(d, family));
    RandomSource rng(8);
    const Eigen::MatrixXcd samples = synthesize_from_spectra(
        input, family, 40000, SourceDistribution::rademacher, rng);

    for (const std::vector<int>& indices :
         {std::vector<int>{2}, std::vector<int>{1, 2}}) {
        RandomSource srng = rng.substream(indices.size());
        const Eigen::MatrixXcd out = stabilize(samples, indices, family, srng);
        Eigen::MatrixXd measured, se;
        empirical_spectra_with_errors(out, family, measured, se);
        const Eigen::MatrixXd predicted =
            stabilized_spectra_prediction(input, indices);
        const double worst_z =
            ((measured - predicted).cwiseAbs().cwiseQuotient(se)).maxCoeff();
        CAPTURE(indices.size());
        CHECK(worst_z < 4.0);
    }
}

TEST_CASE("stabilizing white input keeps every spectrum flat") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    RandomSource rng(9);
    const Eigen::MatrixXcd samples = synthesize_from_spectra(
        flat_spectra(d), family, 40000, SourceDistribution::rademacher, rng);
    RandomSource srng(10);
    const Eigen::MatrixXcd out = stabilize(samples, {1}, family, srng);
    const Eigen::MatrixXd measured = empirical_spectra(out, family);
    // every output spectrum is flat at trace * 1/d per entry scaled by the
    // stabilizer's energy bookkeeping
    const Eigen::MatrixXd predicted =
        stabilized_spectra_prediction(flat_spectra(d), {1});
    for (int k = 0; k <= d; ++k) {
        const double level = predicted(k, 0);
        CHECK((predicted.row(k).array() - level).abs().maxCoeff() < 1e-12);
        CHECK((measured.row(k).array() - level).abs().maxCoeff() < 0.05);
    }
}

TEST_CASE("k-domain vectors have their variance vector as own spectrum") {
    const int d = 5;
    const MubFamily family = MubFamily::build(d);
    RandomSource rng(11);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.uniform(0.05, 1.0);
    v /= v.sum();
    const int k = 4;
    const Eigen::MatrixXcd rx = family.base(k) * v.asDiagonal() *
                                family.base(k).adjoint();
    const CompleteSpectra s =
        spectra_of(CorrelationMatrix::checked(rx), family);
    CHECK((s.spectrum(k) - v).cwiseAbs().maxCoeff() < 1e-12);
    for (int t = 1; t <= d + 1; ++t) {
        if (t == k) continue;
        CHECK((s.spectrum(t).array() - 1.0 / d).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("characterizing the identity operator recovers its block form") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    const RandomOperator identity_op =
        [](const Eigen::MatrixXcd& in, RandomSource&) { return in; };
    RandomSource rng(12);
    const OperatorCharacterization ch =
        characterize_operator(identity_op, family, 4000, rng);

    for (int k = 1; k <= d + 1; ++k) {
        for (int i = 1; i <= d + 1; ++i) {
            const Eigen::MatrixXd block =
                ch.D[k - 1].middleCols((i - 1) * d, d);
            if (i == k) {
                CHECK((block - Eigen::MatrixXd::Identity(d, d))
                          .cwiseAbs()
                          .maxCoeff() < 0.05);
            } else {
                CHECK((block.array() - 1.0 / d).abs().maxCoeff() < 0.05);
            }
        }
    }

    const OperatorClassification cls = classify_operator(ch);
    for (int k = 0; k <= d; ++k) {
        CHECK(cls.switch_source[k] == k + 1);
        CHECK_FALSE(cls.stationarizing[k]);
    }
    // identity touches nothing, so it passes through around any target
    CHECK(cls.untouched_filter_targets.size() == d + 1);
}

TEST_CASE("characterizing a constant-power noise source") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    const RandomOperator noise_op = [d](const Eigen::MatrixXcd& in,
                                        RandomSource& rng) {
        Eigen::MatrixXcd out(d, in.cols());
        for (Eigen::Index c = 0; c < in.cols(); ++c) {
            for (int r = 0; r < d; ++r) {
                out(r, c) = rng.circular_gaussian(1.0 / d);
            }
        }
        return out;
    };
    RandomSource rng(13);
    const OperatorCharacterization ch =
        characterize_operator(noise_op, family, 4000, rng);
    // input-independent output: every row of every response matrix constant
    for (int k = 0; k <= d; ++k) {
        for (int r = 0; r < d; ++r) {
            const double mean = ch.D[k].row(r).mean();
            CHECK((ch.D[k].row(r).array() - mean).abs().maxCoeff() < 0.05);
        }
    }
    const OperatorClassification cls = classify_operator(ch, 0.05);
    for (int k = 0; k <= d; ++k) CHECK(cls.stationarizing[k]);

    // flat prediction regardless of the input spectra
    RandomSource seed_rng(14);
    const CompleteSpectra any =
        whiten_lift(spike_spectra(d, family));
    const SpectraPrediction pred = predict_output_spectra(ch, any);
    for (int k = 0; k <= d; ++k) {
        const double mean = pred.vectors.row(k).mean();
        CHECK((pred.vectors.row(k).array() - mean).abs().maxCoeff() < 0.05);
    }
}

TEST_CASE("prediction matches direct measurement for a stabilizer") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    const RandomOperator op = [&family](const Eigen::MatrixXcd& in,
                                        RandomSource& rng) {
        return stabilize(in, {2}, family, rng);
    };
    RandomSource rng(15);
    const OperatorCharacterization ch =
        characterize_operator(op, family, 6000, rng);

    const CompleteSpectra input = whiten_lift(spike_spectra(d, family));
    const SpectraPrediction pred = predict_output_spectra(ch, input);

    // direct route: the closed-form stabilizer spectra
    const Eigen::MatrixXd expected = stabilized_spectra_prediction(input, {2});
    const double worst_z =
        ((pred.vectors - expected).cwiseAbs().cwiseQuotient(
             pred.std_err.cwiseMax(1e-12)))
            .maxCoeff();
    CHECK(worst_z < 4.0);
}

TEST_CASE("prediction is linear in the shifted spectra") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    const RandomOperator identity_op =
        [](const Eigen::MatrixXcd& in, RandomSource&) { return in; };
    RandomSource rng(16);
    const OperatorCharacterization ch =
        characterize_operator(identity_op, family, 500, rng);

    RandomSource seed_rng(17);
    const CompleteSpectra a =
        whiten_lift(spectra_of(random_psd(d, seed_rng), family));
    const CompleteSpectra b =
        whiten_lift(spectra_of(random_psd(d, seed_rng), family));
    const double alpha = 0.4;
    CompleteSpectra mix = a;
    mix.vectors = alpha * a.vectors + (1.0 - alpha) * b.vectors;
    const Eigen::MatrixXd combined =
        alpha * predict_output_spectra(ch, a).vectors +
        (1.0 - alpha) * predict_output_spectra(ch, b).vectors;
    CHECK((predict_output_spectra(ch, mix).vectors - combined)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("identity prediction returns the input spectra") {
    const int d = 3;
    const MubFamily family = MubFamily::build(d);
    const RandomOperator identity_op =
        [](const Eigen::MatrixXcd& in, RandomSource&) { return in; };
    RandomSource rng(18);
    const OperatorCharacterization ch =
        characterize_operator(identity_op, family, 6000, rng);
    RandomSource seed_rng(19);
    const CompleteSpectra s =
        whiten_lift(spectra_of(random_psd(d, seed_rng), family));
    const SpectraPrediction pred = predict_output_spectra(ch, s);
    CHECK((pred.vectors - s.vectors).cwiseAbs().maxCoeff() < 0.05);
}
