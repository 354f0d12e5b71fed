// georing: parameter checks, analytic bounds and protocol simulations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "georing/analysis.hpp"
#include "georing/config.hpp"
#include "georing/experiments.hpp"
#include "georing/report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace georing;

namespace {

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

struct Run {
    ExperimentConfig cfg;
    fs::path out;
    ordered_json summary = ordered_json::object();
    std::vector<Check> checks;

    void check(std::string name, bool pass, std::string detail)
    {
        checks.push_back({std::move(name), pass, std::move(detail)});
    }

    void write(const std::string& file, const std::string& text) const { write_text_file(out / file, text); }

    int finish(const std::string& summary_file)
    {
        ordered_json cj = ordered_json::array();
        bool ok = true;
        for (const auto& c : checks) {
            cj.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            ok = ok && c.pass;
            std::printf("%s %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        }
        summary["checks"] = cj;
        summary["all_checks_pass"] = ok;
        write(summary_file, summary.dump(2) + "\n");
        return ok ? 0 : 1;
    }
};

std::string fmt(double v)
{
    return format_double(v);
}

ordered_json params_json(const ExperimentConfig& cfg)
{
    const ProtocolParams& p = cfg.params;
    return {{"profile", to_string(cfg.profile)}, {"n", p.n},         {"sigma", p.sigma}, {"epsilon", p.epsilon},
            {"alpha", p.alpha},                 {"beta", p.beta},   {"mu", p.mu},       {"gamma", p.gamma},
            {"r0", p.r0},                       {"d0", p.d0},       {"T0", p.T0},       {"r", p.comm_radius()},
            {"seed", cfg.seed}};
}

int cmd_validate(Run& run)
{
    const ExperimentConfig& cfg = run.cfg;
    ValidationReport rep = validate(cfg.params, cfg.delta);
    ordered_json conds = ordered_json::array();
    for (const auto& c : rep.conditions) {
        conds.push_back({{"name", c.name}, {"inequality", c.inequality}, {"pass", c.pass}, {"accuracy_only", c.accuracy_only}});
        std::printf("%-34s %-28s %s\n", c.name.c_str(), c.inequality.c_str(), c.pass ? "ok" : "VIOLATED");
    }
    run.summary["params"] = params_json(cfg);
    run.summary["conditions"] = conds;
    run.summary["u_max"] = rep.u_max;
    run.summary["delta"] = rep.delta;
    run.summary["min_epsilon_for_delta"] = rep.min_epsilon_for_delta;
    run.summary["greedy_epsilon_threshold"] = rep.greedy_epsilon_threshold;
    run.summary["greedy_threshold_met"] = rep.greedy_threshold_met;
    run.summary["core_regime_pass"] = rep.core_regime_pass;
    run.summary["accuracy_regime_pass"] = rep.accuracy_regime_pass;

    bool want_core = cfg.asserts.core_regime.value_or(true);
    run.check("core_regime", rep.core_regime_pass == want_core,
              std::string("core regime ") + (rep.core_regime_pass ? "holds" : "violated"));
    if (cfg.asserts.accuracy_regime)
        run.check("accuracy_regime", rep.accuracy_regime_pass == *cfg.asserts.accuracy_regime,
                  std::string("accuracy conditions ") + (rep.accuracy_regime_pass ? "hold" : "violated"));
    return run.finish("validate.json");
}

int cmd_schedule(Run& run)
{
    RingSchedule s = ring_schedule(run.cfg.params);
    std::ostringstream csv;
    csv << "index,radius,thickness,lifetime\r\n";
    ordered_json rings = ordered_json::array();
    for (const auto& r : s.rings) {
        csv << r.index << ',' << fmt(r.radius) << ',' << fmt(r.thickness) << ',' << fmt(r.lifetime) << "\r\n";
        rings.push_back({{"index", r.index}, {"radius", r.radius}, {"thickness", r.thickness}, {"lifetime", r.lifetime}});
        std::printf("ring %2d  r=%-12.6g d=%-12.6g T=%.6g\n", r.index, r.radius, r.thickness, r.lifetime);
    }
    run.write("schedule.csv", csv.str());
    run.summary["params"] = params_json(run.cfg);
    run.summary["K"] = s.K;
    run.summary["single_ring"] = s.single_ring;
    run.summary["rings"] = rings;
    return run.finish("schedule.json");
}

int cmd_bounds(Run& run)
{
    const ProtocolParams& p = run.cfg.params;
    auto rows = bounds_table(p);
    std::ostringstream csv;
    write_bounds_csv(csv, rows);
    run.write("bounds.csv", csv.str());
    RingSchedule s = ring_schedule(p);
    OverheadRate oh = overhead_rate(p, s);
    StretchMaximum sm = stretch_oracle(p.alpha, p.beta);
    double sb = stretch_bound(p.alpha, p.beta);
    run.summary["params"] = params_json(run.cfg);
    run.summary["u_max"] = u_max(p.alpha, p.beta);
    run.summary["stretch_bound"] = sb;
    run.summary["stretch_oracle"] = {{"value", sm.value}, {"argmax", sm.argmax}};
    run.summary["exact_location_radius"] = 2.0 * p.comm_radius() / (1.0 - u_max(p.alpha, p.beta));
    run.summary["pmiss_union_bound"] = pmiss_union_bound(p, s);
    run.summary["overhead_rate"] = {{"total", oh.total}, {"ratio", oh.ratio}, {"contracting", oh.contracting}};
    run.summary["uniform_update_overhead"] = uniform_update_overhead(p.n, p.comm_radius(), p.sigma);
    double delta = std::min(run.cfg.delta, std::acos(-1.0) / 3.0);
    run.summary["min_epsilon_for_angle"] = {{"delta", delta}, {"value", min_epsilon_for_angle(delta)}};
    std::printf("U_max=%.6g stretch bound=%.8g oracle=%.8g at x=%.6g\n", u_max(p.alpha, p.beta), sb, sm.value, sm.argmax);
    for (const auto& b : rows)
        std::printf("ring %2d  Pmiss asym=%-11.4g product=%-11.4g area term=%.4g\n", b.index, b.asymptotic, b.product,
                    b.area_term);
    run.check("stretch_oracle_agrees", std::abs(sm.value - sb) <= 1e-6 * std::max(1.0, sb),
              "closed form " + fmt(sb) + " vs numeric " + fmt(sm.value));
    return run.finish("bounds.json");
}

void write_miss_svg(std::ostream& os, const MissResult& res)
{
    const double W = 520, H = 360, L = 60, B = 40, T = 30;
    auto sy = [&](double p) { return H - B - (std::log10(std::max(p, 1e-5)) + 5.0) / 5.0 * (H - T - B); };
    std::size_t n = std::max<std::size_t>(res.rows.size(), 1);
    auto sx = [&](std::size_t i) { return L + (i + 0.5) * (W - L - 20) / n; };
    char buf[240];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"360\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"260\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">worst-case miss probability by ring index</text>\n";
    for (int e = 0; e >= -5; --e) {
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">1e%d</text>\n",
                      L - 6, sy(std::pow(10.0, e)) + 4, e);
        os << buf;
    }
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        const auto& r = res.rows[i];
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"blue\"/>\n"
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"blue\"/>\n"
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"8\" height=\"8\" fill=\"red\"/>\n"
                      "<text x=\"%.1f\" y=\"%g\" text-anchor=\"middle\" font-size=\"11\">i=%d</text>\n",
                      sx(i), sy(r.ci.lo), sx(i), sy(r.ci.hi), sx(i), sy(r.p_miss), sx(i) + 8, sy(r.asymptotic) - 4,
                      sx(i), H - B + 16, r.index);
        os << buf;
    }
    os << "<text x=\"440\" y=\"40\" font-size=\"11\" fill=\"blue\">empirical</text>\n";
    os << "<text x=\"440\" y=\"54\" font-size=\"11\" fill=\"red\">asymptotic bound</text>\n";
    os << "</svg>\n";
}

int cmd_miss(Run& run)
{
    const ExperimentConfig& cfg = run.cfg;
    MissResult res = run_worst_case_miss(cfg.params, cfg.miss, cfg.seed);
    std::ostringstream csv;
    csv << "index,r_i,d_i,T_i,trials,misses,p_miss,ci_low,ci_high,asymptotic,product_bound,routing_failures,"
           "mean_ring_relays,nodes\r\n";
    ordered_json rows = ordered_json::array();
    for (const auto& r : res.rows) {
        csv << r.index << ',' << fmt(r.r_i) << ',' << fmt(r.d_i) << ',' << fmt(r.T_i) << ',' << r.trials << ','
            << r.misses << ',' << fmt(r.p_miss) << ',' << fmt(r.ci.lo) << ',' << fmt(r.ci.hi) << ','
            << fmt(r.asymptotic) << ',' << fmt(r.product_bound) << ',' << r.routing_failures << ','
            << fmt(r.mean_ring_relays) << ',' << r.nodes << "\r\n";
        rows.push_back({{"index", r.index}, {"trials", r.trials}, {"misses", r.misses}, {"p_miss", r.p_miss},
                        {"ci_low", r.ci.lo}, {"ci_high", r.ci.hi}, {"asymptotic", r.asymptotic},
                        {"product_bound", std::isnan(r.product_bound) ? ordered_json(nullptr) : ordered_json(r.product_bound)},
                        {"routing_failures", r.routing_failures}, {"mean_ring_relays", r.mean_ring_relays}});
        std::printf("ring %d: P_miss=%.5f [%.5f, %.5f] over %lld trials, bound %.5f\n", r.index, r.p_miss, r.ci.lo,
                    r.ci.hi, r.trials, r.asymptotic);
    }
    run.write("miss.csv", csv.str());
    std::ostringstream svg;
    write_miss_svg(svg, res);
    run.write("miss.svg", svg.str());
    run.summary["params"] = params_json(cfg);
    run.summary["realizations"] = cfg.miss.realizations;
    run.summary["angles"] = cfg.miss.angles;
    run.summary["thickness_scale"] = cfg.miss.thickness_scale;
    run.summary["rows"] = rows;

    const Assertions& as = cfg.asserts;
    if (as.miss_monotone.value_or(false)) {
        bool mono = true;
        for (std::size_t i = 1; i < res.rows.size(); ++i)
            mono = mono && res.rows[i].p_miss <= res.rows[i - 1].p_miss;
        run.check("miss_monotone", mono, "empirical miss probability non-increasing in ring index");
    }
    if (as.miss_bound_factor) {
        for (const auto& r : res.rows) {
            if (r.index < as.miss_bound_from_index)
                continue;
            run.check("miss_within_bound_i" + std::to_string(r.index), r.p_miss <= *as.miss_bound_factor * r.asymptotic,
                      fmt(r.p_miss) + " <= " + fmt(*as.miss_bound_factor) + " x " + fmt(r.asymptotic));
        }
    }
    return run.finish("miss.json");
}

int cmd_dynamic(Run& run)
{
    const ExperimentConfig& cfg = run.cfg;
    DynamicResult res = run_dynamic(cfg.params, cfg.dynamic, cfg.seed);

    std::ostringstream u_csv, s_csv, l_csv;
    write_cdf_csv(u_csv, res.uncertainty.ccdf(), "uncertainty", "ccdf");
    write_cdf_csv(s_csv, res.reciprocal_stretch.cdf(), "reciprocal_stretch", "cdf");
    RingSchedule schedule = ring_schedule(cfg.params);
    write_ledger_csv(l_csv, res.ledger, schedule, res.elapsed);
    run.write("uncertainty_ccdf.csv", u_csv.str());
    run.write("reciprocal_stretch_cdf.csv", s_csv.str());
    run.write("ledger.csv", l_csv.str());

    std::ostringstream u_svg, s_svg;
    write_cumulative_svg(u_svg, "CCDF of per-hop uncertainty after bootstrap", "uncertainty U",
                         {{"measured", res.uncertainty.ccdf(), "blue"}}, {{res.u_max, "U_max"}}, true);
    write_cumulative_svg(s_svg, "CDF of reciprocal stretch", "1 / stretch",
                         {{"measured", res.reciprocal_stretch.cdf(), "blue"}},
                         {{1.0 / res.stretch_bound, "1/stretch bound"}}, false);
    run.write("uncertainty_ccdf.svg", u_svg.str());
    run.write("reciprocal_stretch_cdf.svg", s_svg.str());

    run.summary["params"] = params_json(cfg);
    run.summary["routes"] = res.routes;
    run.summary["epochs"] = cfg.dynamic.epochs;
    run.summary["warmup"] = res.warmup;
    run.summary["elapsed"] = res.elapsed;
    run.summary["delivered"] = res.delivered;
    run.summary["delivery_rate"] = res.delivery_rate();
    run.summary["failures"] = {{"ttl", res.failures_ttl},
                               {"isolation", res.failures_isolation},
                               {"face_loop", res.failures_face_loop}};
    run.summary["routes_with_misses"] = res.routes_with_misses;
    run.summary["hops"] = {{"total", res.total_hops}, {"face", res.face_hops}};
    run.summary["u_max"] = res.u_max;
    run.summary["uncertainty_samples"] = res.uncertainty.values.size();
    run.summary["uncertainty_at_most_u_max"] = res.uncertainty.fraction_at_most(res.u_max);
    run.summary["stretch_bound"] = res.stretch_bound;
    run.summary["stretch_at_most_bound"] = res.stretch.fraction_at_most(res.stretch_bound);
    run.summary["stretch_max"] = res.stretch.values.empty() ? ordered_json(nullptr) : ordered_json(res.stretch.max());
    run.summary["stretch_mean"] = res.stretch.values.empty() ? ordered_json(nullptr) : ordered_json(res.stretch.mean());
    run.summary["overhead"] = {{"transmissions", res.ledger.total},
                               {"normal_tx", res.ledger.normal_tx},
                               {"abnormal_tx", res.ledger.abnormal_tx},
                               {"measured_rate", res.measured_tx_rate},
                               {"predicted_rate", res.predicted_rate}};
    std::printf("delivered %lld/%lld, U<=U_max for %.4f of %zu hops, stretch<=bound for %.4f of delivered\n",
                res.delivered, res.routes, res.uncertainty.fraction_at_most(res.u_max), res.uncertainty.values.size(),
                res.stretch.fraction_at_most(res.stretch_bound));

    run.check("some_delivered", res.delivered > 0, std::to_string(res.delivered) + " delivered");
    const Assertions& as = cfg.asserts;
    if (as.min_delivery)
        run.check("delivery_rate", res.delivery_rate() >= *as.min_delivery,
                  fmt(res.delivery_rate()) + " >= " + fmt(*as.min_delivery));
    if (as.uncertainty_fraction) {
        double lim = as.uncertainty_limit.value_or(res.u_max);
        double f = res.uncertainty.fraction_at_most(lim);
        run.check("uncertainty_fraction", f >= *as.uncertainty_fraction,
                  "fraction with U <= " + fmt(lim) + " is " + fmt(f));
    }
    if (as.stretch_fraction) {
        double lim = as.stretch_limit.value_or(res.stretch_bound);
        double f = res.stretch.fraction_at_most(lim);
        run.check("stretch_fraction", f >= *as.stretch_fraction, "fraction with stretch <= " + fmt(lim) + " is " + fmt(f));
    }
    return run.finish("dynamic.json");
}

int cmd_snapshot(Run& run)
{
    const ExperimentConfig& cfg = run.cfg;
    SnapshotResult snap = run_snapshot_trajectories(cfg.params, cfg.snapshot, cfg.seed);
    std::ostringstream csv;
    csv << "route,node,x,y,class,color\r\n";
    long long counts[4] = {0, 0, 0, 0};
    for (const auto& h : snap.hops) {
        csv << h.route << ',' << h.node << ',' << fmt(h.position.x) << ',' << fmt(h.position.y) << ','
            << to_string(h.cls) << ',' << color_of(h.cls) << "\r\n";
        ++counts[static_cast<int>(h.cls)];
    }
    run.write("snapshot.csv", csv.str());
    std::ostringstream svg;
    write_snapshot_svg(svg, snap);
    run.write("snapshot.svg", svg.str());
    ordered_json routes = ordered_json::array();
    for (const auto& r : snap.routes)
        routes.push_back({{"delivered", r.delivered}, {"failure", to_string(r.failure)}, {"hops", r.hops},
                          {"face_hops", r.face_hops}, {"stretch", r.delivered ? ordered_json(r.stretch()) : ordered_json(nullptr)}});
    run.summary["params"] = params_json(cfg);
    run.summary["time"] = snap.time;
    run.summary["destination"] = {{"id", snap.dest}, {"x", snap.dest_position.x}, {"y", snap.dest_position.y}};
    run.summary["classes"] = {{"active_update", counts[0]},
                              {"spatially_invalid_update", counts[1]},
                              {"plain_relay", counts[2]},
                              {"face_mode", counts[3]}};
    run.summary["delivered"] = snap.delivered;
    run.summary["routes"] = routes;
    std::printf("%lld of %zu routes delivered, %lld face-mode hops\n", snap.delivered, snap.routes.size(), snap.face_hops);
    run.check("routes_terminate", true, "every route ended delivered or with an explicit failure");
    return run.finish("snapshot.json");
}

int cmd_overhead(Run& run)
{
    const ExperimentConfig& cfg = run.cfg;
    OverheadResult res = run_overhead_scaling(cfg.params, cfg.overhead, cfg.seed);
    std::ostringstream csv;
    csv << "K,measured_rate,predicted_rate,ratio,transmissions\r\n";
    ordered_json pts = ordered_json::array();
    for (const auto& p : res.points) {
        csv << p.K << ',' << fmt(p.measured_rate) << ',' << fmt(p.predicted_rate) << ',' << fmt(p.ratio) << ','
            << p.transmissions << "\r\n";
        pts.push_back({{"K", p.K}, {"measured_rate", p.measured_rate}, {"predicted_rate", p.predicted_rate},
                       {"ratio", p.ratio}, {"transmissions", p.transmissions}});
        std::printf("K=%2d measured=%.6g predicted=%.6g ratio=%.4f\n", p.K, p.measured_rate, p.predicted_rate, p.ratio);
    }
    run.write("overhead.csv", csv.str());
    run.summary["params"] = params_json(cfg);
    run.summary["horizon"] = res.horizon;
    run.summary["contraction_ratio"] = res.contraction_ratio;
    run.summary["contracting"] = res.contracting;
    run.summary["points"] = pts;

    const Assertions& as = cfg.asserts;
    if (as.overhead_max_change && !res.points.empty()) {
        double first = res.points.front().measured_rate, last = res.points.back().measured_rate;
        double change = (last - first) / first;
        run.check("overhead_change", std::abs(change) < *as.overhead_max_change,
                  "relative change " + fmt(change) + " over the sweep");
    }
    if (as.overhead_monotone.value_or(false)) {
        bool mono = true;
        for (std::size_t i = 1; i < res.points.size(); ++i)
            mono = mono && res.points[i].measured_rate > res.points[i - 1].measured_rate;
        run.check("overhead_monotone", mono, "measured rate strictly increasing in K");
    }
    return run.finish("overhead.json");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"georing: position-publish and geographic routing toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides ov;
    std::string profile;
    double n = 0.0;
    std::uint64_t seed = 0;
    int trials = 0;

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(Run&);
    };
    const Sub subs[] = {
        {"validate", "check the parameter regime", cmd_validate},
        {"schedule", "print the ring schedule", cmd_schedule},
        {"bounds", "evaluate analytic bounds", cmd_bounds},
        {"sim-snapshot", "route over a frozen snapshot and classify relays", cmd_snapshot},
        {"sim-miss", "worst-case ring miss experiment", cmd_miss},
        {"sim-dynamic", "publish and route with a moving destination", cmd_dynamic},
        {"sim-overhead", "update overhead as rings are added", cmd_overhead},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> handles;
    for (const auto& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sc->add_option("--seed", seed, "random seed");
        sc->add_option("--out", out_dir, "output directory");
        sc->add_option("--profile", profile, "paper-eps0, paper-eps2 or theorem");
        sc->add_option("--n", n, "node count")->check(CLI::PositiveNumber);
        sc->add_option("--trials", trials, "miss realizations / dynamic routes")->check(CLI::PositiveNumber);
        handles.emplace_back(sc, &s);
    }
    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sc, s] : handles) {
            if (!sc->parsed())
                continue;
            if (sc->count("--profile"))
                ov.profile = profile;
            if (sc->count("--n"))
                ov.n = n;
            if (sc->count("--seed"))
                ov.seed = seed;
            if (sc->count("--trials"))
                ov.trials = trials;
            Run run;
            run.cfg = config_path.empty() ? parse_config("", ov) : load_config(config_path, ov);
            run.out = out_dir;
            return s->fn(run);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
