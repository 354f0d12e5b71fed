#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "georing/experiments.hpp"
#include "georing/params.hpp"

namespace georing {

/// Thresholds checked after a run; unset entries are not checked.
struct Assertions {
    std::optional<bool> core_regime;
    std::optional<bool> accuracy_regime;

    std::optional<bool> miss_monotone;
    std::optional<double> miss_bound_factor;
    int miss_bound_from_index = 2;

    std::optional<double> min_delivery;
    std::optional<double> uncertainty_limit;
    std::optional<double> uncertainty_fraction;
    std::optional<double> stretch_limit;
    std::optional<double> stretch_fraction;

    std::optional<double> overhead_max_change;
    std::optional<bool> overhead_monotone;
};

struct ExperimentConfig {
    Profile profile = Profile::reference_eps2;
    ProtocolParams params;
    double delta = kAccuracyDelta;
    std::uint64_t seed = 1;
    MissConfig miss;
    DynamicConfig dynamic;
    SnapshotConfig snapshot;
    OverheadConfig overhead;
    Assertions asserts;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> profile;
    std::optional<double> n;
    std::optional<std::uint64_t> seed;
    /// Miss realizations and dynamic-run route count.
    std::optional<int> trials;
};

/// Builds a config from a JSON document (empty text means all defaults).
/// Recognized keys: profile, n, params{sigma, epsilon, alpha, beta, mu, gamma,
/// r0, d0, T0}, delta, seed, trials, miss{...}, dynamic{...}, snapshot{...},
/// overhead{...}, assert{...}. Unknown keys are rejected. Zero-ring values not
/// given explicitly are derived from the final n, epsilon, alpha, beta, sigma.
ExperimentConfig parse_config(const std::string& json_text, const Overrides& o = {});
ExperimentConfig load_config(const std::string& path, const Overrides& o = {});

FaceRule parse_face_rule(const std::string& s);

}  // namespace georing
