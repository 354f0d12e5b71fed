#include "georing/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "georing/analysis.hpp"

namespace georing {

using std::numbers::pi;

double comm_radius(double n, double epsilon)
{
    if (!(n >= 2.0))
        throw std::invalid_argument("comm_radius: need n >= 2");
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("comm_radius: need epsilon >= 0");
    return std::sqrt((1.0 + epsilon) * std::log(n) / pi);
}

ZeroRing derive_defaults(double n, double epsilon, double alpha, double beta, double sigma)
{
    if (!(beta > 0.0))
        throw std::invalid_argument("derive_defaults: beta must be positive");
    if (!(sigma > 0.0))
        throw std::invalid_argument("derive_defaults: sigma must be positive");
    if (!(alpha > 1.0))
        throw std::invalid_argument("derive_defaults: alpha must exceed 1");
    double r = comm_radius(n, epsilon);
    double r0 = r / beta;
    double confidence = beta * r0 / sigma;
    return {r0, 2.0 * r, confidence * confidence / 8.0};
}

double ProtocolParams::comm_radius() const
{
    return georing::comm_radius(n, epsilon);
}

double ProtocolParams::box_side() const
{
    return std::sqrt(n);
}

void ProtocolParams::check() const
{
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("invalid parameters: ") + what); };
    if (!(n >= 2.0))
        fail("n >= 2");
    if (!(sigma > 0.0))
        fail("sigma > 0");
    if (!(epsilon >= 0.0))
        fail("epsilon >= 0");
    if (!(alpha > 1.0))
        fail("alpha > 1");
    if (!(beta > 0.0 && beta < 1.0))
        fail("0 < beta < 1");
    if (!(mu > 0.0 && mu < 1.0))
        fail("0 < mu < 1");
    if (!(gamma > 0.0))
        fail("gamma > 0");
    if (!(r0 > 0.0 && d0 > 0.0 && T0 > 0.0))
        fail("r0, d0, T0 > 0");
}

Profile parse_profile(const std::string& name)
{
    if (name == "paper-eps0")
        return Profile::reference_eps0;
    if (name == "paper-eps2")
        return Profile::reference_eps2;
    if (name == "theorem")
        return Profile::accuracy;
    throw std::invalid_argument("unknown profile '" + name + "' (expected paper-eps0, paper-eps2, theorem)");
}

std::string to_string(Profile p)
{
    switch (p) {
    case Profile::reference_eps0:
        return "paper-eps0";
    case Profile::reference_eps2:
        return "paper-eps2";
    case Profile::accuracy:
        return "theorem";
    }
    return "?";
}

ProtocolParams make_profile(Profile profile, double n)
{
    ProtocolParams p;
    p.n = n;
    p.sigma = 1.0;
    p.alpha = 2.0;
    p.beta = 0.25;
    p.mu = 0.55;
    p.gamma = 1.95;
    switch (profile) {
    case Profile::reference_eps0:
        p.epsilon = 0.0;
        break;
    case Profile::reference_eps2:
        p.epsilon = 2.0;
        break;
    case Profile::accuracy:
        p.epsilon = min_epsilon_for_angle(kAccuracyDelta) + 1.0;
        break;
    }
    ZeroRing z = derive_defaults(p.n, p.epsilon, p.alpha, p.beta, p.sigma);
    p.r0 = z.r0;
    p.d0 = z.d0;
    p.T0 = z.T0;
    return p;
}

RingSchedule ring_schedule(const ProtocolParams& p, int K)
{
    p.check();
    if (K < 0)
        throw std::invalid_argument("ring_schedule: K must be nonnegative");
    RingSchedule s;
    s.K = K;
    s.single_ring = K == 0;
    s.rings.reserve(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i) {
        s.rings.push_back({i, p.r0 * std::pow(p.alpha, i), p.d0 * std::pow(p.alpha, p.mu * i),
                           p.T0 * std::pow(p.alpha, p.gamma * i)});
    }
    return s;
}

RingSchedule ring_schedule(const ProtocolParams& p)
{
    p.check();
    double diameter = std::sqrt(2.0 * p.n);
    int K = 0;
    if (p.r0 < diameter) {
        K = static_cast<int>(std::ceil(std::log(diameter / p.r0) / std::log(p.alpha)));
        // guard against log round-off on exact powers
        while (K > 0 && p.r0 * std::pow(p.alpha, K - 1) >= diameter)
            --K;
        while (p.r0 * std::pow(p.alpha, K) < diameter)
            ++K;
    }
    return ring_schedule(p, K);
}

const Condition* ValidationReport::find(const std::string& name) const
{
    for (const auto& c : conditions)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::vector<std::string> ValidationReport::failed() const
{
    std::vector<std::string> out;
    for (const auto& c : conditions)
        if (!c.pass)
            out.push_back(c.name);
    return out;
}

namespace {

std::string fmt_num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string lt(double a, double b)
{
    return fmt_num(a) + " < " + fmt_num(b);
}

}  // namespace

ValidationReport validate(const ProtocolParams& p, double delta)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("validate: delta must be positive");
    ValidationReport rep;
    rep.delta = delta;
    rep.u_max = p.beta < 1.0 ? p.alpha * p.beta / (1.0 - p.beta) : INFINITY;

    auto add = [&](std::string name, double a, double b, bool accuracy_only) {
        rep.conditions.push_back({std::move(name), lt(a, b), a < b, accuracy_only});
    };
    add("alpha>1", 1.0, p.alpha, false);
    add("beta>0", 0.0, p.beta, false);
    add("beta<1/(1+alpha)", p.beta, 1.0 / (1.0 + p.alpha), false);
    add("mu>1/3", 1.0 / 3.0, p.mu, false);
    add("mu<1", p.mu, 1.0, false);
    add("gamma>1+mu", 1.0 + p.mu, p.gamma, false);
    add("gamma<2", p.gamma, 2.0, false);
    add("gamma<4mu", p.gamma, 4.0 * p.mu, false);

    double delta_cap = pi / 3.0;
    if (rep.u_max < 1.0)
        delta_cap = std::min(delta_cap, pi / 2.0 - std::asin(rep.u_max));
    add("delta<min(pi/3,pi/2-asin(Umax))", delta, delta_cap, true);
    double rhs = pi / (delta - std::sin(delta));
    add("1+epsilon>pi/(delta-sin(delta))", rhs, 1.0 + p.epsilon, true);

    rep.min_epsilon_for_delta = rhs - 1.0;
    rep.greedy_threshold_met = p.epsilon > rep.greedy_epsilon_threshold;

    rep.core_regime_pass = true;
    rep.accuracy_regime_pass = true;
    for (const auto& c : rep.conditions) {
        if (!c.pass) {
            rep.accuracy_regime_pass = false;
            if (!c.accuracy_only)
                rep.core_regime_pass = false;
        }
    }
    return rep;
}

double effective_sigma_waypoint(double mean_v2, double mean_d, double mean_d2)
{
    if (!(mean_v2 > 0.0 && mean_d > 0.0 && mean_d2 > 0.0))
        throw std::invalid_argument("effective_sigma_waypoint: inputs must be positive");
    return std::sqrt(mean_v2 * mean_d2 / (2.0 * mean_d));
}

}  // namespace georing
