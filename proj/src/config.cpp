#include "georing/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace georing {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw std::invalid_argument(std::string("config: '") + where + "' must be an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            ok = ok || item.key() == k;
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key '") + item.key() + "' in " + where);
    }
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key))
        out = obj.at(key).get<T>();
}

template <class T>
void read_opt(const json& obj, const char* key, std::optional<T>& out)
{
    if (obj.contains(key))
        out = obj.at(key).get<T>();
}

}  // namespace

FaceRule parse_face_rule(const std::string& s)
{
    if (s == "left" || s == "left-hand")
        return FaceRule::left_hand;
    if (s == "right" || s == "right-hand")
        return FaceRule::right_hand;
    throw std::invalid_argument("unknown face rule '" + s + "' (expected left or right)");
}

ExperimentConfig parse_config(const std::string& json_text, const Overrides& o)
{
    json doc = json_text.empty() ? json::object() : json::parse(json_text);
    only_keys(doc, "top level",
              {"profile", "n", "params", "delta", "seed", "trials", "miss", "dynamic", "snapshot", "overhead", "assert"});

    ExperimentConfig cfg;
    std::string profile = to_string(Profile::reference_eps2);
    read(doc, "profile", profile);
    if (o.profile)
        profile = *o.profile;
    cfg.profile = parse_profile(profile);

    double n = kDeskN;
    read(doc, "n", n);
    if (o.n)
        n = *o.n;
    cfg.params = make_profile(cfg.profile, n);

    ProtocolParams& p = cfg.params;
    std::optional<double> r0, d0, T0;
    if (doc.contains("params")) {
        const json& pj = doc.at("params");
        only_keys(pj, "params", {"sigma", "epsilon", "alpha", "beta", "mu", "gamma", "r0", "d0", "T0"});
        read(pj, "sigma", p.sigma);
        read(pj, "epsilon", p.epsilon);
        read(pj, "alpha", p.alpha);
        read(pj, "beta", p.beta);
        read(pj, "mu", p.mu);
        read(pj, "gamma", p.gamma);
        read_opt(pj, "r0", r0);
        read_opt(pj, "d0", d0);
        read_opt(pj, "T0", T0);
    }
    ZeroRing z = derive_defaults(p.n, p.epsilon, p.alpha, p.beta, p.sigma);
    p.r0 = r0.value_or(z.r0);
    p.d0 = d0.value_or(z.d0);
    p.T0 = T0.value_or(z.T0);
    p.check();

    read(doc, "delta", cfg.delta);
    read(doc, "seed", cfg.seed);
    if (o.seed)
        cfg.seed = *o.seed;

    if (doc.contains("miss")) {
        const json& m = doc.at("miss");
        only_keys(m, "miss", {"indices", "realizations", "angles", "thickness_scale", "margin_sigmas"});
        read(m, "indices", cfg.miss.indices);
        read(m, "realizations", cfg.miss.realizations);
        read(m, "angles", cfg.miss.angles);
        read(m, "thickness_scale", cfg.miss.thickness_scale);
        read(m, "margin_sigmas", cfg.miss.margin_sigmas);
    }
    if (doc.contains("dynamic")) {
        const json& d = doc.at("dynamic");
        only_keys(d, "dynamic", {"routes", "epochs", "epoch_spacing", "warmup_factor", "dest_sigma", "face_rule"});
        read(d, "routes", cfg.dynamic.routes);
        read(d, "epochs", cfg.dynamic.epochs);
        read(d, "epoch_spacing", cfg.dynamic.epoch_spacing);
        read(d, "warmup_factor", cfg.dynamic.warmup_factor);
        read(d, "dest_sigma", cfg.dynamic.dest_sigma);
        if (d.contains("face_rule"))
            cfg.dynamic.face_rule = parse_face_rule(d.at("face_rule").get<std::string>());
    }
    if (doc.contains("snapshot")) {
        const json& s = doc.at("snapshot");
        only_keys(s, "snapshot", {"grid", "warmup_factor", "face_rule"});
        read(s, "grid", cfg.snapshot.grid);
        read(s, "warmup_factor", cfg.snapshot.warmup_factor);
        if (s.contains("face_rule"))
            cfg.snapshot.face_rule = parse_face_rule(s.at("face_rule").get<std::string>());
    }
    if (doc.contains("overhead")) {
        const json& h = doc.at("overhead");
        only_keys(h, "overhead", {"k_extra", "horizon_factor", "dest_sigma", "base_k"});
        read(h, "k_extra", cfg.overhead.k_extra);
        read(h, "horizon_factor", cfg.overhead.horizon_factor);
        read(h, "dest_sigma", cfg.overhead.dest_sigma);
        read(h, "base_k", cfg.overhead.base_k);
    }

    std::optional<int> trials;
    read_opt(doc, "trials", trials);
    if (o.trials)
        trials = o.trials;
    if (trials) {
        if (*trials < 1)
            throw std::invalid_argument("config: trials must be >= 1");
        cfg.miss.realizations = *trials;
        cfg.dynamic.routes = *trials;
    }

    if (doc.contains("assert")) {
        const json& a = doc.at("assert");
        only_keys(a, "assert",
                  {"core_regime", "accuracy_regime", "miss_monotone", "miss_bound_factor", "miss_bound_from_index",
                   "min_delivery", "uncertainty_limit", "uncertainty_fraction", "stretch_limit", "stretch_fraction",
                   "overhead_max_change", "overhead_monotone"});
        Assertions& as = cfg.asserts;
        read_opt(a, "core_regime", as.core_regime);
        read_opt(a, "accuracy_regime", as.accuracy_regime);
        read_opt(a, "miss_monotone", as.miss_monotone);
        read_opt(a, "miss_bound_factor", as.miss_bound_factor);
        read(a, "miss_bound_from_index", as.miss_bound_from_index);
        read_opt(a, "min_delivery", as.min_delivery);
        read_opt(a, "uncertainty_limit", as.uncertainty_limit);
        read_opt(a, "uncertainty_fraction", as.uncertainty_fraction);
        read_opt(a, "stretch_limit", as.stretch_limit);
        read_opt(a, "stretch_fraction", as.stretch_fraction);
        read_opt(a, "overhead_max_change", as.overhead_max_change);
        read_opt(a, "overhead_monotone", as.overhead_monotone);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const Overrides& o)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), o);
}

}  // namespace georing
