#pragma once

#include <optional>
#include <string>
#include <vector>

namespace georing {

/// All protocol tunables. Ring i has inner radius r0*alpha^i, thickness
/// d0*alpha^(mu*i) and lifetime T0*alpha^(gamma*i).
struct ProtocolParams {
    double n = 2e5;
    double sigma = 1.0;
    double epsilon = 2.0;
    double alpha = 2.0;
    double beta = 0.25;
    double mu = 0.55;
    double gamma = 1.95;
    double r0 = 0.0;
    double d0 = 0.0;
    double T0 = 0.0;
    std::optional<double> bandwidth_W;

    /// Communication radius from the connectivity scaling.
    double comm_radius() const;
    double box_side() const;
    /// Throws std::invalid_argument listing the first violated invariant.
    void check() const;
};

/// r = sqrt((1 + epsilon) ln(n) / pi).
double comm_radius(double n, double epsilon);

struct ZeroRing {
    double r0;
    double d0;
    double T0;
};

/// r0 = r/beta, d0 = 2r, T0 = (beta r0 / sigma)^2 / 8.
ZeroRing derive_defaults(double n, double epsilon, double alpha, double beta, double sigma);

/// Named parameter sets.
enum class Profile {
    reference_eps0,  // alpha=2, beta=0.25, mu=0.55, gamma=1.95, epsilon=0
    reference_eps2,  // same with epsilon=2
    accuracy,    // epsilon raised to satisfy the forwarding-accuracy condition at delta=kAccuracyDelta
};

inline constexpr double kReferenceN = 1.8e6;
inline constexpr double kDeskN = 2e5;
/// Forwarding-accuracy angle used by the accuracy profile; below
/// pi/2 - asin(2/3) so every condition can hold at alpha=2, beta=0.25.
inline constexpr double kAccuracyDelta = 0.8;

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);
ProtocolParams make_profile(Profile p, double n);

struct Ring {
    int index;
    double radius;     // r_i
    double thickness;  // d_i
    double lifetime;   // T_i
};

struct RingSchedule {
    std::vector<Ring> rings;
    int K = 0;
    /// Set when r0 already spans the network diameter.
    bool single_ring = false;

    const Ring& operator[](int i) const { return rings.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(rings.size()); }
};

/// K = ceil(log_alpha(sqrt(2n)/r0)), so the outermost ring reaches the diagonal.
RingSchedule ring_schedule(const ProtocolParams& p);
/// Schedule with an explicit outermost index (used by overhead sweeps).
RingSchedule ring_schedule(const ProtocolParams& p, int K);

struct Condition {
    std::string name;
    std::string inequality;  // human-readable evaluated form
    bool pass;
    bool accuracy_only;  // forwarding-accuracy conditions, outside the core regime
};

struct ValidationReport {
    std::vector<Condition> conditions;
    double u_max = 0.0;
    double delta = 0.0;
    double min_epsilon_for_delta = 0.0;
    double greedy_epsilon_threshold = 1.6;
    bool greedy_threshold_met = false;
    /// Scalability/reliability/efficiency inequalities on alpha, beta, mu, gamma.
    bool core_regime_pass = false;
    /// core_regime_pass plus the epsilon/delta conditions.
    bool accuracy_regime_pass = false;

    const Condition* find(const std::string& name) const;
    std::vector<std::string> failed() const;
};

ValidationReport validate(const ProtocolParams& p, double delta);

/// Long-run Brownian scale of a random-waypoint walk: 2 sigma^2 = E[V^2] E[D^2] / E[D].
double effective_sigma_waypoint(double mean_v2, double mean_d, double mean_d2);

}  // namespace georing
