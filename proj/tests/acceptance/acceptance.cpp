// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "georing/analysis.hpp"
#include "georing/experiments.hpp"
#include "georing/params.hpp"
#include "georing/routing.hpp"

using namespace georing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::set<std::string> failed_core(const ProtocolParams& p)
{
    std::set<std::string> out;
    for (const auto& c : validate(p, kAccuracyDelta).conditions)
        if (!c.pass && !c.accuracy_only)
            out.insert(c.name);
    return out;
}

Outcome parameter_regime()
{
    ProtocolParams base = make_profile(Profile::reference_eps0, kReferenceN);
    ValidationReport rep = validate(base, kAccuracyDelta);
    bool ok = rep.core_regime_pass && failed_core(base).empty() && std::abs(rep.u_max - 2.0 / 3.0) < 1e-12;
    std::string detail = "published set " + std::string(ok ? "passes" : "fails");

    const double e = 1e-9;
    struct Case {
        const char* label;
        std::function<void(ProtocolParams&)> edit;
        std::set<std::string> expect;
    };
    std::vector<Case> cases{
        {"gamma=1+mu-", [&](ProtocolParams& p) { p.gamma = 1 + p.mu - e; }, {"gamma>1+mu"}},
        {"gamma=2+", [&](ProtocolParams& p) { p.gamma = 2 + e; }, {"gamma<2"}},
        {"mu=gamma/4-", [&](ProtocolParams& p) { p.mu = p.gamma / 4 - e; }, {"gamma<4mu"}},
        {"beta=1/(1+alpha)+", [&](ProtocolParams& p) { p.beta = 1 / (1 + p.alpha) + e; }, {"beta<1/(1+alpha)"}},
        {"alpha=1-", [&](ProtocolParams& p) { p.alpha = 1 - e; }, {"alpha>1"}},
    };
    int flipped = 0;
    for (const auto& c : cases) {
        ProtocolParams p = base;
        c.edit(p);
        if (failed_core(p) == c.expect)
            ++flipped;
        else
            detail += "; " + std::string(c.label) + " flipped the wrong set";
    }
    detail += "; " + std::to_string(flipped) + "/" + std::to_string(cases.size()) + " perturbations flip exactly one condition";
    return {ok && flipped == static_cast<int>(cases.size()), detail};
}

Outcome stretch_equivalence()
{
    std::mt19937_64 rng(derive_seed(1, 2, 0));
    std::uniform_real_distribution<double> ua(1.5, 4.0), uf(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double alpha = ua(rng);
        double beta = std::max(1e-3, uf(rng)) * 0.95 / (1 + alpha);
        worst = std::max(worst, std::abs(stretch_oracle(alpha, beta).value - stretch_bound(alpha, beta)));
    }
    double closed = stretch_bound(2.0, 0.25), grid = stretch_oracle(2.0, 0.25).value;
    bool ok = worst <= 1e-6 && std::abs(closed - 7.7170) < 5e-5 && std::abs(grid - 7.7170) < 5e-5;
    return {ok, "max |closed - numeric| over 100 draws = " + num(worst, 3) + "; at alpha=2, beta=0.25 closed form " +
                    num(closed, 8) + ", numeric " + num(grid, 8) + " (stated figure line: 9)"};
}

Outcome diffusion_correctness()
{
    ProtocolParams p = make_profile(Profile::reference_eps0, kReferenceN);
    RingSchedule s = ring_schedule(p);
    const Ring& rg = s[2];
    Annulus ring({0, 0}, rg.radius, rg.thickness);
    const int particles = 100000, bins = 20;
    std::mt19937_64 rng(derive_seed(1, 3, 0));
    std::uniform_real_distribution<double> u(0, 1);

    double worst_mass = 0.0;
    int outside = 0;
    double worst_z = 0.0;
    for (double t : {rg.lifetime / 4, rg.lifetime}) {
        double spread = p.sigma * std::sqrt(t);
        double lo = std::max(0.0, rg.radius - 12 * spread), hi = ring.outer_radius() + 12 * spread;
        const int steps = 8000;
        double h = (hi - lo) / steps, mass = 0.0;
        for (int k = 0; k < steps; ++k) {
            double a = lo + (k + 0.5) * h;
            mass += update_density(a, t, ring, p.sigma) * 2 * M_PI * a * h;
        }
        worst_mass = std::max(worst_mass, std::abs(mass / ring.area() - 1));

        double blo = rg.radius - 3 * spread, bhi = ring.outer_radius() + 3 * spread, w = (bhi - blo) / bins;
        std::vector<long long> counts(bins, 0);
        std::normal_distribution<double> g(0, spread);
        double r_in2 = rg.radius * rg.radius, r_out2 = ring.outer_radius() * ring.outer_radius();
        for (int k = 0; k < particles; ++k) {
            double rho = std::sqrt(r_in2 + u(rng) * (r_out2 - r_in2)), phi = 2 * M_PI * u(rng);
            double a = std::hypot(rho * std::cos(phi) + g(rng), rho * std::sin(phi) + g(rng));
            if (a >= blo && a < bhi)
                ++counts[std::min(bins - 1, static_cast<int>((a - blo) / w))];
        }
        double scale = particles / ring.area();
        for (int b = 0; b < bins; ++b) {
            double expect = 0.0;
            for (int q = 0; q < 16; ++q) {
                double a = blo + (b + (q + 0.5) / 16) * w;
                expect += update_density(a, t, ring, p.sigma) * 2 * M_PI * a * w / 16;
            }
            expect *= scale;
            double z = (counts[b] - expect) / std::sqrt(expect);
            worst_z = std::max(worst_z, std::abs(z));
            outside += std::abs(z) > 3;
        }
    }
    bool ok = worst_mass <= 0.005 && outside == 0;
    return {ok, "worst mass error " + num(100 * worst_mass, 3) + "%; " + std::to_string(outside) +
                    " of 40 radii outside 3 sigma (max |z| " + num(worst_z, 3) + ")"};
}

Outcome worst_case_miss()
{
    ProtocolParams p = make_profile(Profile::reference_eps2, kReferenceN);
    MissConfig cfg;
    cfg.realizations = 400;
    cfg.angles = 500;
    MissResult res = run_worst_case_miss(p, cfg, 1);
    bool mono = true, bounded = true;
    std::string detail;
    for (std::size_t k = 0; k < res.rows.size(); ++k) {
        const auto& r = res.rows[k];
        if (k > 0)
            mono = mono && r.p_miss < res.rows[k - 1].p_miss;
        if (r.index >= 2)
            bounded = bounded && r.p_miss <= 3 * r.asymptotic;
        detail += (k ? "; " : "") + std::string("i=") + std::to_string(r.index) + " " + num(r.p_miss, 4) + " (bound " +
                  num(r.asymptotic, 4) + ")";
    }
    return {mono && bounded, std::string(mono ? "monotone" : "NOT monotone") + ", " +
                                 (bounded ? "within 3x bound for i>=2" : "exceeds 3x bound") + ": " + detail};
}

Outcome dynamic_run()
{
    ProtocolParams p = make_profile(Profile::reference_eps2, kDeskN);
    DynamicConfig cfg;
    cfg.routes = 500;
    DynamicResult res = run_dynamic(p, cfg, 1);
    double delivery = res.delivery_rate();
    double u_ok = res.uncertainty.fraction_at_most(2.0 / 3.0);
    double s_ok = res.stretch.fraction_at_most(7.7170);
    bool ok = res.routes >= 500 && delivery >= 0.99 && u_ok >= 0.99 && s_ok >= 0.999;
    return {ok, std::to_string(res.routes) + " routes, delivery " + num(delivery, 4) + ", U <= 2/3 for " +
                    num(100 * u_ok, 5) + "% of " + std::to_string(res.uncertainty.values.size()) +
                    " hops, stretch <= 7.7170 for " + num(100 * s_ok, 5) + "% of delivered"};
}

Outcome scalability()
{
    ProtocolParams p = make_profile(Profile::reference_eps0, kReferenceN);
    OverheadConfig cfg;
    cfg.k_extra = {0, 4};
    cfg.horizon_factor = 4;
    OverheadResult res = run_overhead_scaling(p, cfg, 1);
    double change = res.points[1].measured_rate / res.points[0].measured_rate - 1;

    ProtocolParams div = p;
    div.gamma = 1.5;
    OverheadConfig dcfg;
    dcfg.k_extra = {0, 1, 2, 3, 4};
    dcfg.horizon_factor = 4;
    OverheadResult dres = run_overhead_scaling(div, dcfg, 1);
    bool mono = true;
    std::string rates;
    for (std::size_t k = 0; k < dres.points.size(); ++k) {
        if (k > 0)
            mono = mono && dres.points[k].measured_rate > dres.points[k - 1].measured_rate;
        rates += (k ? " " : "") + num(dres.points[k].measured_rate, 4);
    }
    bool ok = std::abs(change) < 0.10 && mono;
    return {ok, "K " + std::to_string(res.points[0].K) + " -> " + std::to_string(res.points[1].K) + " changes rate by " +
                    num(100 * change, 3) + "%; gamma=1.5 rates " + rates + (mono ? " (increasing)" : " (NOT increasing)")};
}

Outcome forwarding_geometry()
{
    const double delta = M_PI / 3, n = 2000;
    ProtocolParams p = make_profile(Profile::reference_eps2, n);
    p.epsilon = min_epsilon_for_angle(delta) + 1;
    ZeroRing z = derive_defaults(p.n, p.epsilon, p.alpha, p.beta, p.sigma);
    p.r0 = z.r0;
    p.d0 = z.d0;
    p.T0 = z.T0;
    double r = p.comm_radius();

    long long sampled = 0, within = 0;
    double worst = 0.0;
    for (std::uint64_t w = 0; sampled < 2000; ++w) {
        World world = init_world(p, derive_seed(1, 7, w));
        std::vector<NodeStore> stores(world.size());
        RouteContext ctx = make_route_context(world, stores, p, nullptr, 0.0);
        ctx.exact_radius = 0.0;
        std::mt19937_64 rng(derive_seed(1, 8, w));
        std::uniform_int_distribution<NodeId> pick(1, static_cast<NodeId>(world.size() - 1));
        std::uniform_real_distribution<double> coord(0, world.box().side);
        for (int k = 0; k < 200; ++k) {
            NodeId relay = pick(rng);
            Point2 q = world.position(relay);
            double side = world.box().side;
            if (q.x < r || q.y < r || q.x > side - r || q.y > side - r)
                continue;
            Point2 est{coord(rng), coord(rng)};
            if (distance(q, est) <= 2 * r)
                continue;
            Packet pk;
            pk.dest_id = 0;
            pk.ttl = 100;
            pk.estimate = est;
            pk.ring_index = 0;
            pk.mode = ForwardMode::greedy;
            StepResult st = forward_step(pk, relay, ctx);
            if (st.failure != RouteFailure::none || st.hop.mode != ForwardMode::greedy)
                continue;
            double ang = angle_between(world.position(st.next) - q, est - q);
            worst = std::max(worst, ang);
            ++sampled;
            within += ang <= delta + 1e-12;
        }
    }
    std::mt19937_64 rng(derive_seed(1, 9, 0));
    OccupancyResult occ = anchor_occupancy_mc(n, p.epsilon, delta, 1000, rng);
    bool ok = within == sampled && sampled >= 1000 && occ.fraction_all_occupied >= 0.99;
    return {ok, std::to_string(within) + "/" + std::to_string(sampled) + " greedy hops within pi/3 (max " +
                    num(worst * 180 / M_PI, 4) + " deg); anchor occupancy " + num(occ.fraction_all_occupied, 4)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    fs::path root = fs::temp_directory_path() / "georing_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    fs::path cfg = root / "config.json";
    std::ofstream(cfg) << R"({"n": 5000, "seed": 7,
  "miss": {"indices": [0, 1], "realizations": 2, "angles": 40},
  "dynamic": {"routes": 40, "epochs": 4},
  "snapshot": {"grid": 3},
  "overhead": {"k_extra": [0, 1], "horizon_factor": 2}})";
    const char* subs[] = {"validate", "schedule", "bounds", "sim-snapshot", "sim-miss", "sim-dynamic", "sim-overhead"};
    int identical = 0, total = 0;
    std::string detail;
    for (const char* sub : subs) {
        std::vector<fs::path> outs;
        bool ran = true;
        for (int rep = 0; rep < 2; ++rep) {
            fs::path out = root / (std::string(sub) + "_" + std::to_string(rep));
            std::string cmd = std::string("\"") + GEORING_CLI + "\" " + sub + " --config \"" + cfg.string() +
                              "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
            int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) > 1)
                ran = false;
            outs.push_back(out);
        }
        ++total;
        bool same = ran && fs::exists(outs[0]);
        std::set<std::string> names;
        if (same) {
            for (const auto& e : fs::directory_iterator(outs[0]))
                names.insert(e.path().filename().string());
            for (const auto& e : fs::directory_iterator(outs[1]))
                same = same && names.count(e.path().filename().string());
            same = same && !names.empty();
            for (const auto& name : names)
                same = same && slurp(outs[0] / name) == slurp(outs[1] / name);
        }
        identical += same;
        if (!same)
            detail += std::string(" ") + sub + " differs;";
    }
    fs::remove_all(root);
    return {identical == total,
            std::to_string(identical) + "/" + std::to_string(total) + " subcommands byte-identical across reruns" + detail};
}

}  // namespace

int main()
{
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"parameter regime", parameter_regime},
        {"stretch oracle equivalence", stretch_equivalence},
        {"diffusion correctness", diffusion_correctness},
        {"worst-case miss", worst_case_miss},
        {"dynamic run", dynamic_run},
        {"scalability contraction", scalability},
        {"forwarding geometry", forwarding_geometry},
        {"determinism", determinism},
    };
    int failures = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures ? 1 : 0;
}
