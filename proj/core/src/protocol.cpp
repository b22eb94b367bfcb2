#include "mubsa/protocol.hpp"

#include "mubsa/prime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mubsa {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// The five mutually unbiased bases of C^4, entries i^code / 2.
// Columns are listed per basis; code 0,1,2,3 -> 1, i, -1, -i.
constexpr int kDim4Codes[4][4][4] = {
    // base 2
    {{0, 0, 0, 0}, {0, 0, 2, 2}, {0, 2, 2, 0}, {0, 2, 0, 2}},
    // base 3
    {{0, 2, 3, 3}, {0, 2, 1, 1}, {0, 0, 1, 3}, {0, 0, 3, 1}},
    // base 4
    {{0, 3, 3, 2}, {0, 3, 1, 0}, {0, 1, 1, 2}, {0, 1, 3, 0}},
    // base 5
    {{0, 3, 2, 3}, {0, 3, 0, 1}, {0, 1, 0, 3}, {0, 1, 2, 1}},
};

MubFamily dimension_four_family() {
    const std::complex<double> unit[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    std::vector<Eigen::MatrixXcd> bases;
    bases.push_back(Eigen::MatrixXcd::Identity(4, 4));
    for (int b = 0; b < 4; ++b) {
        Eigen::MatrixXcd m(4, 4);
        for (int col = 0; col < 4; ++col) {
            for (int row = 0; row < 4; ++row) {
                m(row, col) = unit[kDim4Codes[b][col][row]] * 0.5;
            }
        }
        bases.push_back(m);
    }
    return MubFamily::from_bases(bases);
}

struct ReplicateOutcome {
    std::vector<bool> correct;     // per tracked sender
    std::vector<int> settle_round; // round from which the decision stays correct
    double foreign_energy = 0.0;
    double estimator_value = 0.0;  // slot-0 mean of the first tracked sender
    double estimator_expected = 0.0;
    double estimator_variance = 0.0;
    double quantization_error = 0.0;
};

} // namespace

void ProtocolConfig::validate() const {
    if (d != 4 && !is_odd_prime(d)) {
        throw std::invalid_argument(
            "channel dimension must be 4 or an odd prime");
    }
    if (n < 1) throw std::invalid_argument("need at least one user");
    if (slots_per_user < 2 || slots_per_user > d) {
        throw std::invalid_argument("slots_per_user must lie in [2, d]");
    }
    if (rounds < 1) throw std::invalid_argument("rounds must be positive");
    if (replicates < 1) {
        throw std::invalid_argument("replicates must be positive");
    }
    if (noise_power < 0.0) throw std::invalid_argument("negative noise power");
    if (gap <= 0.0 || gap > 1.0) {
        throw std::invalid_argument("gap must lie in (0, 1]");
    }
    if ((quant_magnitude_levels > 0) != (quant_phase_levels > 0)) {
        throw std::invalid_argument(
            "magnitude and phase quantization go together");
    }
    if (quant_magnitude_levels == 1 || quant_phase_levels == 1) {
        throw std::invalid_argument("quantizer needs at least two levels");
    }
    if (!has_seed) throw std::invalid_argument("simulation requires a seed");
    for (const auto& w : active_schedule) {
        if (w.user < 1 || w.user > n || w.start_round < 0 ||
            w.end_round < w.start_round) {
            throw std::invalid_argument("malformed active window");
        }
    }
    for (const auto& p : tracked_pairs) {
        if (p.sender < 1 || p.sender > n || p.receiver < 1 || p.receiver > n ||
            p.sender == p.receiver) {
            throw std::invalid_argument("malformed tracked pair");
        }
    }
}

double ProtocolConfig::quant_max_magnitude() const {
    return 2.0 * std::sqrt(static_cast<double>(n));
}

UserAssignment assign_user(int d, int slots_per_user, int user) {
    if (user < 1) throw std::invalid_argument("users are numbered from 1");
    const int per_base = std::max(1, d / slots_per_user);
    const int group = (user - 1) / per_base;
    const int ordinal = (user - 1) % per_base;
    UserAssignment a;
    a.user = user;
    a.base_index = group % (d + 1) + 1;
    a.slots.resize(slots_per_user);
    for (int s = 0; s < slots_per_user; ++s) {
        a.slots[s] = ordinal * slots_per_user + s;
    }
    return a;
}

MubFamily channel_family(int d) {
    if (d == 4) return dimension_four_family();
    return MubFamily::build(d);
}

Eigen::VectorXcd encode_user_round(const std::vector<double>& messages,
                                   const UserAssignment& assignment,
                                   const MubFamily& family,
                                   RandomSource& rng) {
    if (messages.size() != assignment.slots.size()) {
        throw std::invalid_argument("one message per slot required");
    }
    const int d = family.dim();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    for (std::size_t s = 0; s < messages.size(); ++s) {
        const double m = messages[s];
        if (m < 0.0 || m > 1.0) {
            throw std::invalid_argument("messages must lie in [0, 1]");
        }
        const double amplitude = std::sqrt(m) * rng.rademacher();
        if (amplitude != 0.0) {
            v += amplitude *
                 family.base_column(assignment.base_index, assignment.slots[s]);
        }
    }
    return v;
}

std::complex<double> Quantizer::apply(std::complex<double> z) const {
    if (!enabled()) return z;
    double mag = std::min(std::abs(z), max_magnitude);
    double phase = std::arg(z);
    if (magnitude_levels > 1) {
        const double step = max_magnitude / (magnitude_levels - 1);
        mag = std::round(mag / step) * step;
    }
    if (phase_levels > 1) {
        const double step = kTwoPi / phase_levels;
        phase = std::round(phase / step) * step;
    }
    return std::polar(mag, phase);
}

Eigen::VectorXcd channel_step(const std::vector<Eigen::VectorXcd>& user_vectors,
                              double noise_power, const Quantizer& quantizer,
                              RandomSource& rng) {
    if (user_vectors.empty()) {
        throw std::invalid_argument("channel needs at least one vector");
    }
    Eigen::VectorXcd x = user_vectors.front();
    for (std::size_t i = 1; i < user_vectors.size(); ++i) {
        if (user_vectors[i].size() != x.size()) {
            throw std::invalid_argument("user vectors differ in length");
        }
        x += user_vectors[i];
    }
    if (noise_power > 0.0) {
        for (Eigen::Index e = 0; e < x.size(); ++e) {
            x[e] += rng.circular_gaussian(noise_power);
        }
    }
    if (quantizer.enabled()) {
        for (Eigen::Index e = 0; e < x.size(); ++e) {
            x[e] = quantizer.apply(x[e]);
        }
    }
    return x;
}

SecondMomentDecoder::SecondMomentDecoder(const MubFamily& family,
                                         int base_index, std::vector<int> slots)
    : slots_(std::move(slots)) {
    if (slots_.empty()) throw std::invalid_argument("no watched slots");
    watch_columns_.resize(family.dim(),
                          static_cast<Eigen::Index>(slots_.size()));
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        watch_columns_.col(static_cast<Eigen::Index>(s)) =
            family.base_column(base_index, slots_[s]);
    }
    sum_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(slots_.size()));
    sum_sq_ = sum_;
}

void SecondMomentDecoder::add_round(const Eigen::VectorXcd& received) {
    const Eigen::VectorXd energy =
        (watch_columns_.adjoint() * received).cwiseAbs2();
    sum_ += energy;
    sum_sq_ += energy.cwiseProduct(energy);
    ++rounds_;
}

Eigen::VectorXd SecondMomentDecoder::means() const {
    if (rounds_ == 0) return sum_;
    return sum_ / rounds_;
}

Eigen::VectorXd SecondMomentDecoder::variances() const {
    if (rounds_ < 2) return Eigen::VectorXd::Zero(sum_.size());
    const Eigen::VectorXd m = means();
    return (sum_sq_ / rounds_ - m.cwiseProduct(m)).cwiseMax(0.0) *
           (static_cast<double>(rounds_) / (rounds_ - 1));
}

int SecondMomentDecoder::argmax_slot() const {
    Eigen::Index best = 0;
    means().maxCoeff(&best);
    return static_cast<int>(best);
}

namespace {

ReplicateOutcome run_replicate(const ProtocolConfig& config,
                               const MubFamily& family,
                               const std::vector<UserAssignment>& assignments,
                               const std::vector<int>& tracked_senders,
                               const Quantizer& quantizer, RandomSource rng) {
    const int d = config.d;
    const int n = config.n;
    RandomSource message_rng = rng.substream(1);
    RandomSource sign_rng = rng.substream(2);
    RandomSource noise_rng = rng.substream(3);

    // fresh messages; the first two are an exact-gap pair in random order
    std::vector<std::vector<double>> messages(n);
    for (int u = 0; u < n; ++u) {
        auto& m = messages[u];
        m.resize(config.slots_per_user);
        const double low = message_rng.uniform01() * (1.0 - config.gap);
        const bool first_larger = message_rng.bernoulli(0.5);
        m[0] = first_larger ? low + config.gap : low;
        m[1] = first_larger ? low : low + config.gap;
        for (int s = 2; s < config.slots_per_user; ++s) {
            m[s] = message_rng.uniform01();
        }
    }

    std::vector<SecondMomentDecoder> decoders;
    decoders.reserve(tracked_senders.size());
    for (int sender : tracked_senders) {
        const auto& a = assignments[sender - 1];
        decoders.emplace_back(family, a.base_index,
                              std::vector<int>{a.slots[0], a.slots[1]});
    }

    auto active_at = [&](int user, int round) {
        bool has_window = false;
        for (const auto& w : config.active_schedule) {
            if (w.user != user) continue;
            has_window = true;
            if (round >= w.start_round && round < w.end_round) return true;
        }
        return !has_window;
    };

    ReplicateOutcome outcome;
    outcome.correct.assign(tracked_senders.size(), false);
    outcome.settle_round.assign(tracked_senders.size(), config.rounds + 1);
    std::vector<int> last_wrong(tracked_senders.size(), -1);

    double foreign_energy_sum = 0.0;
    double quant_error_sum = 0.0;
    long long quant_entries = 0;
    const int watched_base =
        tracked_senders.empty()
            ? 0
            : assignments[tracked_senders.front() - 1].base_index;

    Eigen::VectorXcd x(d);
    for (int round = 0; round < config.rounds; ++round) {
        x.setZero();
        for (int u = 1; u <= n; ++u) {
            if (!active_at(u, round)) continue;
            const auto& a = assignments[u - 1];
            double energy = 0.0;
            for (int s = 0; s < config.slots_per_user; ++s) {
                const double m = messages[u - 1][s];
                energy += m;
                const double amplitude = std::sqrt(m) * sign_rng.rademacher();
                if (amplitude != 0.0) {
                    x += amplitude *
                         family.base_column(a.base_index, a.slots[s]);
                }
            }
            if (a.base_index != watched_base) foreign_energy_sum += energy;
        }
        if (config.noise_power > 0.0) {
            for (int e = 0; e < d; ++e) {
                x[e] += noise_rng.circular_gaussian(config.noise_power);
            }
        }
        if (quantizer.enabled()) {
            for (int e = 0; e < d; ++e) {
                const std::complex<double> q = quantizer.apply(x[e]);
                quant_error_sum += std::abs(q - x[e]);
                x[e] = q;
            }
            quant_entries += d;
        }
        for (std::size_t t = 0; t < decoders.size(); ++t) {
            decoders[t].add_round(x);
            const auto means = decoders[t].means();
            const auto& msg = messages[tracked_senders[t] - 1];
            const bool now_correct =
                (means[0] > means[1]) == (msg[0] > msg[1]);
            if (!now_correct) last_wrong[t] = round;
        }
    }

    for (std::size_t t = 0; t < decoders.size(); ++t) {
        const auto means = decoders[t].means();
        const auto& msg = messages[tracked_senders[t] - 1];
        outcome.correct[t] = (means[0] > means[1]) == (msg[0] > msg[1]);
        // settle round is 1-based; decisions wrong at the final round
        // never settle within the run
        if (last_wrong[t] < 0) {
            outcome.settle_round[t] = 1;
        } else if (last_wrong[t] + 1 < config.rounds) {
            outcome.settle_round[t] = last_wrong[t] + 2;
        } else {
            outcome.settle_round[t] = config.rounds + 1;
        }
    }
    outcome.foreign_energy = foreign_energy_sum / config.rounds;
    outcome.quantization_error =
        quant_entries > 0 ? quant_error_sum / quant_entries : 0.0;

    if (!decoders.empty()) {
        const auto& dec = decoders.front();
        outcome.estimator_value = dec.means()[0];
        outcome.estimator_variance = dec.variances()[0];
        outcome.estimator_expected =
            messages[tracked_senders.front() - 1][0] +
            outcome.foreign_energy / d + config.noise_power;
    }
    return outcome;
}

} // namespace

ProtocolMetrics run_mac_simulation(const ProtocolConfig& config) {
    config.validate();
    const MubFamily family = channel_family(config.d);

    std::vector<UserAssignment> assignments;
    assignments.reserve(config.n);
    for (int u = 1; u <= config.n; ++u) {
        assignments.push_back(assign_user(config.d, config.slots_per_user, u));
    }

    std::vector<TrackedPair> pairs = config.tracked_pairs;
    if (pairs.empty()) {
        for (int s = 1; s <= config.n; ++s) {
            for (int r = 1; r <= config.n; ++r) {
                if (s != r) pairs.push_back({s, r});
            }
        }
    }
    // all receivers see the identical broadcast sum, so statistics are
    // gathered once per distinct sender
    std::vector<int> tracked_senders;
    for (const auto& p : pairs) {
        if (std::find(tracked_senders.begin(), tracked_senders.end(),
                      p.sender) == tracked_senders.end()) {
            tracked_senders.push_back(p.sender);
        }
    }
    if (tracked_senders.empty()) tracked_senders.push_back(1);

    Quantizer quantizer;
    if (config.quant_magnitude_levels > 0) {
        quantizer.magnitude_levels = config.quant_magnitude_levels;
        quantizer.phase_levels = config.quant_phase_levels;
        quantizer.max_magnitude = config.quant_max_magnitude();
    }

    std::vector<int> correct_count(tracked_senders.size(), 0);
    std::vector<int> settle_rounds;
    settle_rounds.reserve(static_cast<std::size_t>(config.replicates) *
                          tracked_senders.size());
    double bias_sum = 0.0;
    double variance_sum = 0.0;
    double foreign_sum = 0.0;
    double quant_sum = 0.0;

    RandomSource root(config.seed);
    for (int rep = 0; rep < config.replicates; ++rep) {
        const ReplicateOutcome outcome = run_replicate(
            config, family, assignments, tracked_senders, quantizer,
            root.substream(static_cast<std::uint64_t>(rep)));
        for (std::size_t t = 0; t < tracked_senders.size(); ++t) {
            if (outcome.correct[t]) ++correct_count[t];
            settle_rounds.push_back(outcome.settle_round[t]);
        }
        bias_sum += outcome.estimator_value - outcome.estimator_expected;
        variance_sum += outcome.estimator_variance;
        foreign_sum += outcome.foreign_energy;
        quant_sum += outcome.quantization_error;
    }

    ProtocolMetrics metrics;
    metrics.rounds = config.rounds;
    metrics.replicates = config.replicates;
    metrics.estimator_bias = bias_sum / config.replicates;
    metrics.estimator_variance = variance_sum / config.replicates;
    metrics.mean_foreign_energy = foreign_sum / config.replicates;
    metrics.quantization_error = quant_sum / config.replicates;
    const double k_over_d = metrics.mean_foreign_energy / config.d;
    metrics.variance_bound_ratio =
        k_over_d > 0.0 ? metrics.estimator_variance / (k_over_d * k_over_d)
                       : 0.0;

    metrics.min_accuracy = 1.0;
    for (const auto& p : pairs) {
        const std::size_t t = static_cast<std::size_t>(
            std::find(tracked_senders.begin(), tracked_senders.end(),
                      p.sender) -
            tracked_senders.begin());
        const double acc =
            static_cast<double>(correct_count[t]) / config.replicates;
        const double se =
            std::sqrt(std::max(acc * (1.0 - acc), 1e-12) / config.replicates);
        metrics.pairs.push_back({p.sender, p.receiver, acc,
                                 std::max(0.0, acc - 1.96 * se),
                                 std::min(1.0, acc + 1.96 * se)});
        metrics.min_accuracy = std::min(metrics.min_accuracy, acc);
    }

    // smallest round count by which two thirds of the tracked decisions
    // settled on the correct answer
    if (!settle_rounds.empty()) {
        std::sort(settle_rounds.begin(), settle_rounds.end());
        const std::size_t idx = static_cast<std::size_t>(
            std::ceil(settle_rounds.size() * 2.0 / 3.0));
        const int at = settle_rounds[std::min(idx > 0 ? idx - 1 : 0,
                                              settle_rounds.size() - 1)];
        metrics.rounds_to_two_thirds = at <= config.rounds ? at : -1;
    }
    return metrics;
}

RoundsEstimate estimate_rounds_needed(ProtocolConfig config,
                                      double target_success, int cap) {
    if (target_success <= 0.0 || target_success >= 1.0) {
        throw std::invalid_argument("target success must lie in (0, 1)");
    }
    if (cap < 1) throw std::invalid_argument("cap must be positive");
    RoundsEstimate estimate;
    for (int rounds = 1;; rounds *= 2) {
        config.rounds = rounds;
        const ProtocolMetrics metrics = run_mac_simulation(config);
        estimate.history.emplace_back(rounds, metrics.min_accuracy);
        estimate.foreign_energy = metrics.mean_foreign_energy;
        if (metrics.min_accuracy >= target_success) {
            estimate.rounds = rounds;
            return estimate;
        }
        if (rounds >= cap) {
            estimate.rounds = rounds;
            estimate.capped = true;
            return estimate;
        }
    }
}

} // namespace mubsa
