#ifndef MUBSA_PROTOCOL_HPP
#define MUBSA_PROTOCOL_HPP

#include "mubsa/mub_family.hpp"
#include "mubsa/rng.hpp"

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace mubsa {

/// Rounds [start, end) during which a user transmits. Users outside all
/// of their windows stay silent; a user with no windows is always on.
struct ActiveWindow {
    int user = 0;
    int start_round = 0;
    int end_round = 0;
};

struct TrackedPair {
    int sender = 0;
    int receiver = 0;
};

/// Channel scenario: n users over a summing broadcast channel of
/// dimension d, one frame of d intervals per round. Every knob that
/// affects randomness is seeded; there is no wall-clock fallback.
struct ProtocolConfig {
    int d = 5;
    int n = 2;
    int slots_per_user = 2;
    int rounds = 100;
    double noise_power = 0.0;
    int quant_magnitude_levels = 0; // 0 disables quantization
    int quant_phase_levels = 0;
    double gap = 0.2;       // enforced separation of each user's two messages
    int replicates = 200;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::vector<ActiveWindow> active_schedule;
    std::vector<TrackedPair> tracked_pairs; // empty: all ordered pairs

    /// Throws std::invalid_argument when a field is out of contract.
    void validate() const;

    /// Quantizer range; fixed from n so both ends agree a priori.
    double quant_max_magnitude() const;
};

/// Which base and which slots within it a user owns. Bases fill up two
/// slots at a time; once every (base, slot block) is taken, additional
/// users wrap around and share, which only raises cross-domain energy.
struct UserAssignment {
    int user = 0;
    int base_index = 0;
    std::vector<int> slots;
};

UserAssignment assign_user(int d, int slots_per_user, int user);

/// Family used on the channel: the odd-prime construction, or the fixed
/// five-basis family of dimension four.
MubFamily channel_family(int d);

/// One round of one user: amplitudes sqrt(message) with a fresh fair sign
/// per slot, synthesized in the user's base. Messages must lie in [0,1].
Eigen::VectorXcd encode_user_round(const std::vector<double>& messages,
                                   const UserAssignment& assignment,
                                   const MubFamily& family, RandomSource& rng);

/// Uniform magnitude/phase quantizer on [0, max_magnitude] x [0, 2pi).
struct Quantizer {
    int magnitude_levels = 0;
    int phase_levels = 0;
    double max_magnitude = 1.0;

    bool enabled() const { return magnitude_levels > 0 || phase_levels > 0; }
    std::complex<double> apply(std::complex<double> z) const;
};

/// Entrywise sum of the user vectors, plus circular white noise of the
/// given power, then quantization when configured.
Eigen::VectorXcd channel_step(const std::vector<Eigen::VectorXcd>& user_vectors,
                              double noise_power, const Quantizer& quantizer,
                              RandomSource& rng);

/// Running second-moment statistics of |(M_b^H X)_s|^2 for watched slots.
class SecondMomentDecoder {
public:
    SecondMomentDecoder(const MubFamily& family, int base_index,
                        std::vector<int> slots);

    void add_round(const Eigen::VectorXcd& received);

    int rounds() const { return rounds_; }
    Eigen::VectorXd means() const;
    Eigen::VectorXd variances() const; // per-round sample variance
    int argmax_slot() const;           // position within the watched list

private:
    Eigen::MatrixXcd watch_columns_;
    std::vector<int> slots_;
    Eigen::VectorXd sum_;
    Eigen::VectorXd sum_sq_;
    int rounds_ = 0;
};

struct PairStat {
    int sender = 0;
    int receiver = 0;
    double accuracy = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct ProtocolMetrics {
    std::vector<PairStat> pairs;
    double min_accuracy = 0.0;
    int rounds_to_two_thirds = -1; // -1 when never reached
    double estimator_bias = 0.0;
    double estimator_variance = 0.0;
    // variance relative to K^2/d^2, the shape the foreign energy imposes
    double variance_bound_ratio = 0.0;
    double quantization_error = 0.0; // mean per-entry |quantized - exact|
    double mean_foreign_energy = 0.0;
    int rounds = 0;
    int replicates = 0;
};

/// Full multi-round, multi-replicate simulation. Each replicate draws
/// fresh messages per user with the configured gap between the two
/// decision messages, runs the channel, and records whether each tracked
/// receiver ranks the sender's messages correctly.
ProtocolMetrics run_mac_simulation(const ProtocolConfig& config);

struct RoundsEstimate {
    int rounds = 0;
    bool capped = false;
    double foreign_energy = 0.0;
    std::vector<std::pair<int, double>> history; // (rounds, min accuracy)
};

/// Doubling search for the smallest power-of-two round count at which
/// every tracked pair decodes with at least target_success frequency.
RoundsEstimate estimate_rounds_needed(ProtocolConfig config,
                                      double target_success, int cap);

} // namespace mubsa

#endif // MUBSA_PROTOCOL_HPP
