#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "georing/analysis.hpp"
#include "georing/config.hpp"
#include "georing/experiments.hpp"
#include "georing/report.hpp"

using namespace georing;

TEST_CASE("derived seeds are stable and distinct")
{
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("wilson interval")
{
    Interval a = wilson_interval(0, 10);
    CHECK(a.lo == doctest::Approx(0.0));
    CHECK(a.hi == doctest::Approx(0.2775).epsilon(1e-3));
    Interval b = wilson_interval(5, 10);
    CHECK(b.lo == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(b.hi == doctest::Approx(0.7634).epsilon(1e-3));
    Interval c = wilson_interval(0, 0);
    CHECK(c.lo == 0.0);
    CHECK(c.hi == 1.0);
}

TEST_CASE("cumulative views")
{
    MetricSeries s{"x", {3, 1, 2, 2, 5}};
    auto cdf = s.cdf();
    REQUIRE(cdf.size() == 4);
    CHECK(cdf[0].value == 1);
    CHECK(cdf[0].cumulative == doctest::Approx(0.2));
    CHECK(cdf[1].cumulative == doctest::Approx(0.6));
    CHECK(cdf.back().cumulative == 1.0);
    auto ccdf = s.ccdf();
    CHECK(ccdf.front().cumulative == 1.0);
    CHECK(ccdf[1].cumulative == doctest::Approx(0.8));
    CHECK(ccdf.back().cumulative == doctest::Approx(0.2));
    CHECK(s.fraction_at_most(2) == doctest::Approx(0.6));
    CHECK(s.mean() == doctest::Approx(2.6));
    CHECK(s.max() == 5);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    MetricSeries big{"y", {}};
    for (int i = 0; i < 100003; ++i)
        big.values.push_back(u(rng));
    CHECK(std::abs(big.cdf().back().cumulative - 1.0) <= 1e-9);
    CHECK(std::abs(big.ccdf().front().cumulative - 1.0) <= 1e-9);

    MetricSeries empty{"z", {}};
    CHECK(empty.cdf().empty());
    CHECK(empty.fraction_at_most(1) == 0.0);
}

TEST_CASE("csv output")
{
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    CHECK(format_double(std::nan("")) == "nan");

    std::ostringstream os;
    write_cdf_csv(os, {}, "value", "cdf");
    CHECK(os.str() == "value,cdf\r\n");

    std::ostringstream os2;
    write_cdf_csv(os2, MetricSeries{"x", {1, 2}}.cdf(), "value", "cdf");
    CHECK(os2.str() == "value,cdf\r\n1,0.5\r\n2,1\r\n");
}

TEST_CASE("svg output is well formed for empty and filled series")
{
    std::ostringstream a;
    write_cumulative_svg(a, "t", "x", {}, {}, false);
    CHECK(a.str().rfind("<svg", 0) == 0);
    CHECK(a.str().find("</svg>") != std::string::npos);
    std::ostringstream b;
    PlotSeries ps{"u", MetricSeries{"u", {0.1, 0.5, 0.9}}.ccdf(), "#1f77b4"};
    write_cumulative_svg(b, "t & <u>", "x", {ps}, {{2.0 / 3.0, "bound"}}, true);
    CHECK(b.str().find("t &amp; &lt;u&gt;") != std::string::npos);
    CHECK(b.str().find("bound") != std::string::npos);
}

TEST_CASE("config parsing")
{
    ExperimentConfig d = parse_config("");
    CHECK(d.profile == Profile::reference_eps2);
    CHECK(d.params.n == kDeskN);
    CHECK(d.seed == 1);

    ExperimentConfig c = parse_config(R"({"profile":"paper-eps0","n":5000,"params":{"alpha":3,"r0":20},
        "seed":9,"trials":7,"dynamic":{"face_rule":"right"},"assert":{"min_delivery":0.9}})");
    CHECK(c.profile == Profile::reference_eps0);
    CHECK(c.params.alpha == 3);
    CHECK(c.params.r0 == 20);
    CHECK(c.params.d0 == doctest::Approx(2 * comm_radius(5000, 0.0)));
    CHECK(c.seed == 9);
    CHECK(c.miss.realizations == 7);
    CHECK(c.dynamic.routes == 7);
    CHECK(c.dynamic.face_rule == FaceRule::right_hand);
    CHECK(*c.asserts.min_delivery == 0.9);

    Overrides o;
    o.n = 8000;
    o.seed = 4;
    o.profile = "theorem";
    ExperimentConfig e = parse_config(R"({"n":5000,"seed":9})", o);
    CHECK(e.params.n == 8000);
    CHECK(e.seed == 4);
    CHECK(e.profile == Profile::accuracy);

    CHECK_THROWS(parse_config(R"({"bogus":1})"));
    CHECK_THROWS(parse_config(R"({"params":{"lambda":1}})"));
    CHECK_THROWS(parse_config(R"({"params":{"beta":1.5}})"));
    CHECK_THROWS(parse_config(R"({"trials":0})"));
    CHECK_THROWS(parse_config("{not json"));
    CHECK_THROWS(parse_face_rule("up"));
}

TEST_CASE("thick rings are never missed")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, kDeskN);
    MissConfig cfg;
    cfg.indices = {1};
    cfg.realizations = 2;
    cfg.angles = 100;
    cfg.thickness_scale = 10.0;
    MissResult res = run_worst_case_miss(p, cfg, 3);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].trials == 200);
    CHECK(res.rows[0].misses == 0);
    CHECK(std::isnan(res.rows[0].product_bound));
}

TEST_CASE("worst-case miss is reproducible")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, kDeskN);
    MissConfig cfg;
    cfg.indices = {0};
    cfg.realizations = 2;
    cfg.angles = 60;
    MissResult a = run_worst_case_miss(p, cfg, 11), b = run_worst_case_miss(p, cfg, 11);
    CHECK(a.rows[0].misses == b.rows[0].misses);
    CHECK(a.rows[0].mean_ring_relays == b.rows[0].mean_ring_relays);
    CHECK(a.rows[0].asymptotic == doctest::Approx(pmiss_asymptotic(miss_inputs(p, ring_schedule(p), 0))));
    cfg.margin_sigmas = 2.0;
    CHECK_THROWS(run_worst_case_miss(p, cfg, 11));
}

TEST_CASE("relay classification")
{
    NodeStore s;
    UpdateRecord u;
    u.dest_id = 0;
    u.ring_index = 1;
    u.center = {0, 0};
    u.estimate = {0, 0};
    u.issue_time = 0;
    u.expiry_time = 10;
    u.inner_radius = 5;
    u.thickness = 2;
    store_update(s, u);
    CHECK(classify_relay(s, {6, 0}, 1, 0, false) == NodeClass::active);
    CHECK(classify_relay(s, {9, 0}, 1, 0, false) == NodeClass::invalid);
    CHECK(classify_relay(s, {9, 0}, 11, 0, false) == NodeClass::plain);
    CHECK(classify_relay(NodeStore{}, {9, 0}, 1, 0, false) == NodeClass::plain);
    CHECK(classify_relay(s, {6, 0}, 1, 0, true) == NodeClass::face);
    CHECK(std::string(color_of(NodeClass::invalid)) == "green");

    // green exactly when a live record is held but none is usable here
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> c(-10, 10), t(0, 12);
    for (int k = 0; k < 2000; ++k) {
        Point2 q{c(rng), c(rng)};
        double now = t(rng);
        bool held = now < u.expiry_time;
        bool usable = best_active_update(s, q, now, 0).has_value();
        CHECK((classify_relay(s, q, now, 0, false) == NodeClass::invalid) == (held && !usable));
    }
}

TEST_CASE("snapshot trajectories")
{
    SnapshotConfig cfg;
    cfg.grid = 5;
    ProtocolParams p0 = make_profile(Profile::reference_eps0, 20000);
    ProtocolParams p2 = make_profile(Profile::reference_eps2, 20000);
    SnapshotResult s0 = run_snapshot_trajectories(p0, cfg, 21);
    SnapshotResult s2 = run_snapshot_trajectories(p2, cfg, 21);
    CHECK(s0.routes.size() == s2.routes.size());
    for (const auto* s : {&s0, &s2})
        for (const RouteResult& r : s->routes) {
            CHECK(r.delivered == (r.failure == RouteFailure::none));
            if (r.delivered)
                CHECK(r.path.back() == s->dest);
        }
    CHECK(s2.face_hops < s0.face_hops);
    std::ostringstream os;
    write_snapshot_svg(os, s2);
    CHECK(os.str().find("</svg>") != std::string::npos);
}

TEST_CASE("dynamic run with a stationary destination")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 20000);
    DynamicConfig cfg;
    cfg.routes = 80;
    cfg.epochs = 4;
    cfg.dest_sigma = 0.0;
    DynamicResult res = run_dynamic(p, cfg, 31);
    CHECK(res.routes == 80);
    CHECK(res.delivered == 80);
    CHECK(res.uncertainty.max() == 0.0);
    CHECK(res.stretch.max() <= stretch_bound(p.alpha, p.beta));
    CHECK(res.reciprocal_stretch.values.size() == 80);

    DynamicResult again = run_dynamic(p, cfg, 31);
    CHECK(again.stretch.values == res.stretch.values);
    CHECK(again.ledger.total == res.ledger.total);
}

TEST_CASE("overhead sweep")
{
    ProtocolParams p = make_profile(Profile::reference_eps2, 20000);
    OverheadConfig cfg;
    cfg.k_extra = {0, 2};
    cfg.horizon_factor = 2;
    OverheadResult res = run_overhead_scaling(p, cfg, 5);
    REQUIRE(res.points.size() == 2);
    CHECK(res.contracting);
    CHECK(res.points[1].K == res.points[0].K + 2);
    CHECK(res.points[1].measured_rate >= res.points[0].measured_rate);
    for (const auto& pt : res.points) {
        CHECK(pt.predicted_rate == doctest::Approx(overhead_rate(p, ring_schedule(p, pt.K)).total));
        CHECK(pt.ratio == doctest::Approx(pt.measured_rate / pt.predicted_rate));
    }
}

TEST_CASE("bounds table")
{
    ProtocolParams p = make_profile(Profile::reference_eps0, kReferenceN);
    auto rows = bounds_table(p);
    CHECK(rows.size() == 9);
    CHECK(rows[3].r_i == doctest::Approx(68.52).epsilon(1e-3));
    CHECK(rows[3].asymptotic == doctest::Approx(2.87e-3).epsilon(0.01));
    std::ostringstream os;
    write_bounds_csv(os, rows);
    std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}
