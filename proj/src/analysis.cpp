#include "georing/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quadrature.hpp"

namespace georing {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Bessel I0

namespace {

constexpr double kSeriesCutover = 15.0;

double i0_series(double x)
{
    double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

// Hankel expansion of exp(-x) I0(x); terms shrink until k ~ 2x, so at the
// cutover the truncation error is near exp(-30).
double i0_scaled_asymptotic(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (next >= term)
            break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

}  // namespace

double bessel_i0(double x)
{
    if (!(x >= 0.0))
        throw std::domain_error("bessel_i0: argument must be nonnegative");
    if (x < kSeriesCutover)
        return i0_series(x);
    return std::exp(x) * i0_scaled_asymptotic(x);
}

double bessel_i0_scaled(double x)
{
    if (!(x >= 0.0))
        throw std::domain_error("bessel_i0_scaled: argument must be nonnegative");
    if (x < kSeriesCutover)
        return std::exp(-x) * i0_series(x);
    return i0_scaled_asymptotic(x);
}

// ---------------------------------------------------------------------------
// Stretch

double u_max(double alpha, double beta)
{
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("u_max: need 0 <= beta < 1");
    return alpha * beta / (1.0 - beta);
}

namespace {

void require_bounded(double alpha, double beta)
{
    if (!(alpha >= 1.0))
        throw std::invalid_argument("stretch: need alpha >= 1");
    if (!(u_max(alpha, beta) < 1.0))
        throw std::domain_error("stretch: unbounded regime (alpha*beta/(1-beta) >= 1)");
}

double outer_chord(double alpha, double beta)
{
    double c = 1.0 - beta;
    double o = alpha * (1.0 + beta);
    return std::sqrt(o * o - c * c);
}

}  // namespace

double stretch_bound(double alpha, double beta)
{
    require_bounded(alpha, beta);
    double c = 1.0 - beta;
    double ratio = alpha * (1.0 + beta) / c;
    double inner = std::sqrt(std::max(0.0, ratio * ratio - 1.0)) +
                   alpha * (1.0 + beta) / std::sqrt(c * c - alpha * alpha * beta * beta);
    return std::sqrt(1.0 + inner * inner);
}

double bootstrap_distance(double x, double alpha, double beta)
{
    double lo = 1.0 - beta;
    double hi = alpha * (1.0 + beta);
    if (!(x >= lo && x <= hi))
        throw std::domain_error("bootstrap_distance: x outside [1-beta, alpha(1+beta)]");
    return std::sqrt(std::max(0.0, x * x - lo * lo)) + outer_chord(alpha, beta);
}

double stretch_profile(double x, double alpha, double beta)
{
    require_bounded(alpha, beta);
    double c = 1.0 - beta;
    double post = alpha * (1.0 - beta * beta) / std::sqrt(c * c - alpha * alpha * beta * beta);
    return (bootstrap_distance(x, alpha, beta) + post) / x;
}

StretchMaximum stretch_oracle(double alpha, double beta, int grid_points)
{
    require_bounded(alpha, beta);
    if (grid_points < 3)
        throw std::invalid_argument("stretch_oracle: need at least 3 grid points");
    double lo = 1.0 - beta;
    double hi = alpha * (1.0 + beta);
    auto f = [&](double x) { return stretch_profile(x, alpha, beta); };

    double step = (hi - lo) / (grid_points - 1);
    int best = 0;
    double best_val = f(lo);
    for (int k = 1; k < grid_points; ++k) {
        double v = f(std::min(hi, lo + k * step));
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    double a = std::max(lo, lo + (best - 1) * step);
    double b = std::min(hi, lo + (best + 1) * step);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > 1e-13 * std::max(1.0, std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    double fm = f(xm);
    if (fm < best_val)
        return {best_val, lo + best * step};
    return {fm, xm};
}

// ---------------------------------------------------------------------------
// Miss probability

MissBoundInputs miss_inputs(const ProtocolParams& p, const RingSchedule& s, int i)
{
    const Ring& ring = s[i];
    return {ring.thickness, ring.lifetime, ring.radius, p.sigma, p.comm_radius()};
}

double pmiss_asymptotic(const MissBoundInputs& in)
{
    if (!(in.T_i > 0.0 && in.sigma > 0.0 && in.r > 0.0))
        throw std::invalid_argument("pmiss_asymptotic: T_i, sigma and r must be positive");
    double exponent = in.d_i * in.d_i / (in.sigma * in.r * std::sqrt(2.0 * pi * in.T_i));
    return std::min(1.0, std::exp(-exponent));
}

double update_density(double a, double t, const Annulus& ring, double sigma)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("update_density: t must be nonnegative");
    if (!(a >= 0.0))
        throw std::invalid_argument("update_density: a must be nonnegative");
    if (t == 0.0 || sigma == 0.0)
        return (a >= ring.inner_radius && a <= ring.outer_radius()) ? 1.0 : 0.0;

    double s2 = sigma * sigma * t;
    double spread = std::sqrt(s2);
    double lo = std::max(ring.inner_radius, a - 12.0 * spread);
    double hi = std::min(ring.outer_radius(), a + 12.0 * spread);
    if (!(hi > lo))
        return 0.0;

    // rho/s2 * exp(-(a^2+rho^2)/(2 s2)) I0(a rho/s2), rewritten with the
    // scaled Bessel function so large arguments do not overflow.
    auto integrand = [&](double rho) {
        double d = a - rho;
        return rho / s2 * std::exp(-d * d / (2.0 * s2)) * bessel_i0_scaled(a * rho / s2);
    };
    int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / spread)), 1, 512);
    double v = detail::Quadrature(1e-9).integrate(integrand, lo, hi, panels);
    return std::clamp(v, 0.0, 1.0);
}

ProductBound pmiss_product_bound(int i, const ProtocolParams& p, const RingSchedule& s)
{
    const Ring& ring = s[i];
    double r = p.comm_radius();
    Annulus annulus({0.0, 0.0}, ring.radius, ring.thickness);
    auto density = [&](double a) { return update_density(a, ring.lifetime, annulus, p.sigma); };

    ProductBound out{};
    out.hops = static_cast<int>(std::floor(ring.thickness / r));
    out.product = 1.0;
    for (int l = 1; l <= out.hops; ++l)
        out.product *= 1.0 - density(ring.radius + l * r);

    int panels = std::clamp(static_cast<int>(std::ceil(ring.thickness / (p.sigma * std::sqrt(ring.lifetime)))), 4, 256);
    double mass = detail::Quadrature(1e-8).integrate(density, ring.radius, annulus.outer_radius(), panels);
    out.integral = std::exp(-mass / r);
    return out;
}

double pmiss_union_bound(const ProtocolParams& p, const RingSchedule& s)
{
    double total = 0.0;
    for (int i = 0; i <= s.K; ++i)
        total += pmiss_asymptotic(miss_inputs(p, s, i));
    return total;
}

// ---------------------------------------------------------------------------
// Overhead

OverheadRate overhead_rate(const ProtocolParams& p, const RingSchedule& s)
{
    double r = p.comm_radius();
    OverheadRate out{};
    out.area_terms.assign(static_cast<std::size_t>(s.K) + 1, 0.0);
    out.line_terms.assign(static_cast<std::size_t>(s.K) + 1, 0.0);
    out.total = 0.0;
    for (int i = 1; i <= s.K; ++i) {
        const Ring& ring = s[i];
        double area = ring.radius * ring.thickness / (r * r) / ring.lifetime;
        double line = ring.radius / r / ring.lifetime;
        out.area_terms[i] = area;
        out.line_terms[i] = line;
        out.total += area + line;
    }
    out.ratio = std::pow(p.alpha, 1.0 + p.mu - p.gamma);
    out.contracting = out.ratio < 1.0;
    return out;
}

double uniform_update_overhead(double n, double r, double sigma)
{
    if (!(n > 0.0 && r > 0.0 && sigma >= 0.0))
        throw std::invalid_argument("uniform_update_overhead: need n, r > 0 and sigma >= 0");
    return sigma * sigma / (r * r) * (1.0 + std::log(std::sqrt(n) / r));
}

// ---------------------------------------------------------------------------
// Forwarding accuracy

double min_epsilon_for_angle(double delta, bool tightened)
{
    if (!(delta > 0.0 && delta <= pi / 3.0 + 1e-15))
        throw std::domain_error("min_epsilon_for_angle: delta must lie in (0, pi/3]");
    double gap = tightened ? delta - 0.5 * std::sin(2.0 * delta) : delta - std::sin(delta);
    return pi / gap - 1.0;
}

double anchor_area(double delta, double r)
{
    return (delta - std::sin(delta)) * r * r;
}

OccupancyResult anchor_occupancy_mc(double n, double epsilon, double delta, int probes, std::mt19937_64& rng)
{
    if (!(delta > 0.0 && delta <= pi / 3.0 + 1e-15))
        throw std::domain_error("anchor_occupancy_mc: delta must lie in (0, pi/3]");
    if (probes < 1)
        throw std::invalid_argument("anchor_occupancy_mc: need at least one probe");
    double r = comm_radius(n, epsilon);
    double side = std::sqrt(n);
    if (side <= 2.0 * r)
        throw std::invalid_argument("anchor_occupancy_mc: box too small for interior probes");

    int anchors = static_cast<int>(std::ceil(2.0 * pi / delta - 1e-12));
    double offset = 2.0 * r * std::cos(delta / 2.0);
    std::uniform_real_distribution<double> coord(0.0, side);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int all_occupied = 0;
    long long empty_total = 0;
    std::vector<Point2> nodes(static_cast<std::size_t>(n));
    // one fresh deployment per probe keeps probes independent
    for (int k = 0; k < probes; ++k) {
        for (auto& q : nodes)
            q = {coord(rng), coord(rng)};
        Point2 v;
        std::size_t vid;
        do {
            vid = static_cast<std::size_t>(unit(rng) * nodes.size()) % nodes.size();
            v = nodes[vid];
        } while (v.x < r || v.y < r || v.x > side - r || v.y > side - r);

        double rotation = 2.0 * pi * unit(rng);
        std::vector<Point2> centers;
        for (int j = 0; j < anchors; ++j) {
            double th = rotation + 2.0 * pi * j / anchors;
            centers.push_back(v + Point2{std::cos(th), std::sin(th)} * offset);
        }
        std::vector<bool> occupied(static_cast<std::size_t>(anchors), false);
        for (std::size_t id = 0; id < nodes.size(); ++id) {
            if (id == vid)
                continue;
            const Point2& q = nodes[id];
            if (distance(q, v) > r)
                continue;
            for (int j = 0; j < anchors; ++j)
                if (distance(q, centers[j]) <= r)
                    occupied[j] = true;
        }
        int empty = static_cast<int>(std::count(occupied.begin(), occupied.end(), false));
        empty_total += empty;
        if (empty == 0)
            ++all_occupied;
    }
    return {static_cast<double>(all_occupied) / probes, probes, anchors,
            static_cast<double>(empty_total) / probes};
}

}  // namespace georing
