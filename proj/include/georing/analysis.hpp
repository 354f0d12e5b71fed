#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "georing/geometry.hpp"
#include "georing/params.hpp"

namespace georing {

// ---------------------------------------------------------------------------
// Special functions

/// Modified Bessel function I0(x), x >= 0. Overflows past x ~ 713; use the
/// scaled form for large arguments.
double bessel_i0(double x);

/// exp(-x) * I0(x), x >= 0.
double bessel_i0_scaled(double x);

// ---------------------------------------------------------------------------
// Route quality

/// Worst post-bootstrap uncertainty alpha*beta/(1-beta).
double u_max(double alpha, double beta);

/// Closed-form worst-case stretch. Throws when u_max >= 1.
double stretch_bound(double alpha, double beta);

/// Worst-case distance travelled before bootstrap, x in [1-beta, alpha(1+beta)],
/// normalized by the inner ring radius.
double bootstrap_distance(double x, double alpha, double beta);

/// Stretch of a source at normalized distance x (bootstrap leg + post-bootstrap leg).
double stretch_profile(double x, double alpha, double beta);

struct StretchMaximum {
    double value;
    double argmax;
};

/// Numeric maximum of stretch_profile over [1-beta, alpha(1+beta)]:
/// dense grid followed by golden-section refinement.
StretchMaximum stretch_oracle(double alpha, double beta, int grid_points = 10000);

// ---------------------------------------------------------------------------
// Miss probability

struct MissBoundInputs {
    double d_i;
    double T_i;
    double r_i;
    double sigma;
    double r;
};

MissBoundInputs miss_inputs(const ProtocolParams& p, const RingSchedule& s, int i);

/// exp(-d_i^2 / (sigma r sqrt(2 pi T_i))), clamped to 1.
double pmiss_asymptotic(const MissBoundInputs& in);

/// Density of nodes still carrying an update, at distance a from the ring
/// center, t time units after issue (all ring nodes carry it at t = 0).
double update_density(double a, double t, const Annulus& ring, double sigma);

struct ProductBound {
    double product;   // prod over hops l=1..floor(d_i/r) of (1 - density(r_i + l r))
    double integral;  // exp(-(1/r) * integral of the density across the ring)
    int hops;
};

ProductBound pmiss_product_bound(int i, const ProtocolParams& p, const RingSchedule& s);

/// Union bound over every ring of the schedule.
double pmiss_union_bound(const ProtocolParams& p, const RingSchedule& s);

// ---------------------------------------------------------------------------
// Overhead

struct OverheadRate {
    double total;                 // transmissions per unit time, rings 1..K
    std::vector<double> area_terms;  // r_i d_i / (r^2 T_i), index i (entry 0 unused = 0)
    std::vector<double> line_terms;  // r_i / (r T_i)
    double ratio;                 // alpha^(1 + mu - gamma)
    bool contracting;
};

OverheadRate overhead_rate(const ProtocolParams& p, const RingSchedule& s);

/// Per-node overhead needed to hold uncertainty uniform everywhere, with all
/// unspecified order constants set to one: (sigma^2/r^2) (1 + ln(sqrt(n)/r)).
double uniform_update_overhead(double n, double r, double sigma);

// ---------------------------------------------------------------------------
// Forwarding-direction accuracy

/// pi/(delta - sin delta) - 1, for 0 < delta <= pi/3. With `tightened`, uses
/// delta - sin(2 delta)/2 in the denominator.
double min_epsilon_for_angle(double delta, bool tightened = false);

/// Area (delta - sin delta) r^2 of one lens-shaped anchor region.
double anchor_area(double delta, double r);

struct OccupancyResult {
    double fraction_all_occupied;
    int probes;
    int anchors;
    double mean_empty_per_probe;
};

/// Uniform density-1 deployment of n nodes; for each probe node away from the
/// boundary, check the ceil(2 pi / delta) anchor lenses around it.
OccupancyResult anchor_occupancy_mc(double n, double epsilon, double delta, int probes, std::mt19937_64& rng);

}  // namespace georing
