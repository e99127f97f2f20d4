#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dck/error.hpp"
#include "dck/kernelmat.hpp"

namespace dck::cli {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Block {
public:
    Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail("", "expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

    [[nodiscard]] const json* get(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() || it->is_null() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(key, "expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) fail(key, "expected a finite number");
        return x;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!get(key)) return std::nullopt;
        return number(key, 0.0);
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<std::int64_t>() < 0) fail(key, "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(key, "expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(key, "expected a string");
        const auto s = v->get<std::string>();
        for (const char* a : allowed) {
            if (s == a) return s;
        }
        std::string options;
        for (const char* a : allowed) options += std::string(options.empty() ? "" : ", ") + a;
        fail(key, "must be one of: " + options);
    }

    Block child(const std::string& key) {
        const json* v = get(key);
        static const json empty = json::object();
        return Block(v ? *v : empty, qualified(key));
    }

    std::vector<std::pair<double, double>> terms(const std::string& key, std::vector<std::pair<double, double>> fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_array()) fail(key, "expected a list of [coefficient, rate] pairs");
        std::vector<std::pair<double, double>> out;
        for (const auto& item : *v) {
            if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
                fail(key, "expected a list of [coefficient, rate] pairs");
            }
            out.emplace_back(item[0].get<double>(), item[1].get<double>());
        }
        return out;
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = get(key);
        std::vector<double> out;
        if (!v) return out;
        if (!v->is_array()) fail(key, "expected a list of numbers");
        for (const auto& item : *v) {
            if (!item.is_number()) fail(key, "expected a list of numbers");
            out.push_back(item.get<double>());
        }
        return out;
    }

    GridSpec grid(const std::string& key, GridSpec fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        GridSpec g;
        if (v->is_array()) {
            g.points = numbers(key);
            return g;
        }
        Block b(*v, qualified(key));
        g.matlab_default = b.flag("matlab_default", false);
        g.start = b.optional_number("start");
        g.stop = b.optional_number("stop");
        g.count = b.count("count", 0);
        b.finish();
        if (g.matlab_default) {
            if (g.start || g.stop || g.count == 0) fail(key, "matlab_default grids take only a positive count");
        } else if (!g.start || !g.stop || g.count == 0) {
            fail(key, "expected a list of points or {start, stop, count}");
        }
        return g;
    }

    void finish() const {
        for (const auto& [k, _] : node_.items()) {
            if (!seen_.count(k)) fail(k, "unknown key");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw InputError("config: " + qualified(key) + ": " + why);
    }

private:
    [[nodiscard]] std::string qualified(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

KernelSpec parse_kernel(Block b) {
    const auto type = b.text("type", "DC", {"SS", "TC", "DC", "Spline1", "Spline2", "GenSpline1"});
    KernelSpec spec = KernelSpec::spline1();
    if (type == "SS") {
        spec = KernelSpec::ss(b.number("alpha", 1.0));
    } else if (type == "TC") {
        spec = KernelSpec::tc(b.number("beta", 0.5));
    } else if (type == "DC") {
        spec = KernelSpec::dc(b.number("alpha", 1.0), b.number("beta", 0.5));
    } else if (type == "Spline2") {
        spec = KernelSpec::spline2();
    } else if (type == "GenSpline1") {
        spec = KernelSpec::gen_spline1(b.number("rho", 0.0));
    }
    b.finish();
    return spec;
}

json grid_to_json(const GridSpec& g) {
    if (g.matlab_default) return {{"matlab_default", true}, {"count", g.count}};
    if (g.start) return {{"start", *g.start}, {"stop", *g.stop}, {"count", g.count}};
    return g.points;
}

json terms_to_json(const std::vector<std::pair<double, double>>& terms) {
    json out = json::array();
    for (const auto& [c, r] : terms) out.push_back({c, r});
    return out;
}

GridSpec even(double start, double stop, std::size_t count) {
    GridSpec g;
    g.start = start;
    g.stop = stop;
    g.count = count;
    return g;
}

void refresh_effective(RunConfig& cfg) {
    const auto& q = cfg.quadrature;
    json e;
    e["kernel"] = kernel_to_json(cfg.kernel);
    e["quadrature"] = {{"panels", q.panels},
                       {"graded_panels", q.graded_panels},
                       {"grading_ratio", q.grading_ratio},
                       {"tolerance", q.tolerance},
                       {"max_refinements", q.max_refinements},
                       {"convolution_panels", q.convolution_panels}};
    const auto& est = cfg.estimation;
    e["estimation"] = {{"gamma", est.gamma ? json(*est.gamma) : json(nullptr)},
                       {"gamma_grid", est.gamma_grid},
                       {"input", est.input},
                       {"input_terms", terms_to_json(est.input_terms)},
                       {"noise_variance", est.noise_variance},
                       {"eval_times", grid_to_json(est.eval_times)}};
    const auto& s = cfg.sampling;
    e["sampling"] = {{"seed", s.seed}, {"count", s.count}, {"process", s.process}, {"grid", grid_to_json(s.grid)}};
    e["expand"] = {{"truncation", cfg.expand.truncation}, {"grid", grid_to_json(cfg.expand.grid)}};
    e["norm"] = {{"terms", terms_to_json(cfg.norm.terms)}, {"truncation", cfg.norm.truncation}};
    e["tridiag"] = {{"grid", grid_to_json(cfg.tridiag.grid)}, {"heatmap", cfg.tridiag.heatmap}};
    const auto& v = cfg.verify;
    e["verify"] = {{"seed", v.seed},
                   {"mc_samples", v.mc_samples},
                   {"random_grids", v.random_grids},
                   {"tridiag_draws", v.tridiag_draws},
                   {"norm_triples", v.norm_triples},
                   {"reference_grid_seed", v.reference_grid_seed}};
    cfg.effective = std::move(e);
    cfg.hash = fnv1a_hex(cfg.effective.dump());
}

}  // namespace

std::vector<double> GridSpec::resolve() const {
    if (matlab_default) return matlab_default_sorted_uniforms(count);
    if (!start) return points;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? *start : *start + (*stop - *start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json kernel_to_json(const KernelSpec& spec) {
    json k{{"type", std::string(to_string(spec.kind()))}};
    switch (spec.kind()) {
        case KernelKind::SS: k["alpha"] = spec.alpha(); break;
        case KernelKind::TC: k["beta"] = spec.beta(); break;
        case KernelKind::DC:
            k["alpha"] = spec.alpha();
            k["beta"] = spec.beta();
            break;
        case KernelKind::GenSpline1: k["rho"] = spec.rho(); break;
        default: break;
    }
    return k;
}

RunConfig parse_config(const json& doc) {
    Block root(doc, "");
    RunConfig cfg;
    cfg.kernel = parse_kernel(root.child("kernel"));

    {
        Block q = root.child("quadrature");
        auto& c = cfg.quadrature;
        c.panels = static_cast<int>(q.count("panels", static_cast<std::uint64_t>(c.panels)));
        c.graded_panels = static_cast<int>(q.count("graded_panels", static_cast<std::uint64_t>(c.graded_panels)));
        c.grading_ratio = q.number("grading_ratio", c.grading_ratio);
        c.tolerance = q.number("tolerance", c.tolerance);
        c.max_refinements = static_cast<int>(q.count("max_refinements", static_cast<std::uint64_t>(c.max_refinements)));
        c.convolution_panels =
            static_cast<int>(q.count("convolution_panels", static_cast<std::uint64_t>(c.convolution_panels)));
        q.finish();
        c.validate();
    }
    {
        Block e = root.child("estimation");
        auto& est = cfg.estimation;
        est.gamma = e.optional_number("gamma");
        if (est.gamma && !(*est.gamma > 0.0)) e.fail("gamma", "must be > 0");
        est.gamma_grid = e.numbers("gamma_grid");
        for (double g : est.gamma_grid) {
            if (!(g > 0.0)) e.fail("gamma_grid", "values must be > 0");
        }
        if (est.gamma && !est.gamma_grid.empty()) e.fail("gamma", "give either gamma or gamma_grid, not both");
        est.input = e.text("input", "zoh", {"zoh", "impulse", "step", "exp_sum"});
        est.input_terms = e.terms("input_terms", {});
        if (est.input == "exp_sum" && est.input_terms.empty()) e.fail("input_terms", "required for exp_sum input");
        if (est.input != "exp_sum" && !est.input_terms.empty()) e.fail("input_terms", "only valid for exp_sum input");
        est.noise_variance = e.number("noise_variance", 0.0);
        if (!(est.noise_variance >= 0.0)) e.fail("noise_variance", "must be >= 0");
        est.eval_times = e.grid("eval_times", even(0.0, 5.0, 101));
        e.finish();
    }
    {
        Block s = root.child("sampling");
        auto& smp = cfg.sampling;
        smp.seed = s.count("seed", smp.seed);
        smp.count = s.count("count", smp.count);
        smp.process = s.text("process", "dc", {"dc", "dc_markov", "genspline"});
        GridSpec fallback;
        fallback.points = smp.process == "genspline" ? std::vector<double>{0.2, 0.5, 1.0}
                                                     : std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0};
        smp.grid = s.grid("grid", fallback);
        s.finish();
    }
    {
        Block x = root.child("expand");
        cfg.expand.truncation = x.count("truncation", cfg.expand.truncation);
        if (cfg.expand.truncation == 0) x.fail("truncation", "must be >= 1");
        cfg.expand.grid = x.grid("grid", even(0.01, 1.0, 100));
        x.finish();
    }
    {
        Block n = root.child("norm");
        cfg.norm.terms = n.terms("terms", cfg.norm.terms);
        if (cfg.norm.terms.empty()) n.fail("terms", "must not be empty");
        cfg.norm.truncation = n.count("truncation", cfg.norm.truncation);
        if (cfg.norm.truncation == 0) n.fail("truncation", "must be >= 1");
        n.finish();
    }
    {
        Block t = root.child("tridiag");
        GridSpec fallback;
        fallback.matlab_default = true;
        fallback.count = 10;
        cfg.tridiag.grid = t.grid("grid", fallback);
        cfg.tridiag.heatmap = t.flag("heatmap", true);
        t.finish();
    }
    {
        Block v = root.child("verify");
        auto& ver = cfg.verify;
        ver.seed = v.count("seed", ver.seed);
        ver.mc_samples = v.count("mc_samples", ver.mc_samples);
        ver.random_grids = v.count("random_grids", ver.random_grids);
        ver.tridiag_draws = v.count("tridiag_draws", ver.tridiag_draws);
        ver.norm_triples = v.count("norm_triples", ver.norm_triples);
        ver.reference_grid_seed = static_cast<std::uint32_t>(v.count("reference_grid_seed", ver.reference_grid_seed));
        if (ver.mc_samples < 2) v.fail("mc_samples", "must be >= 2");
        v.finish();
    }
    {
        Block io = root.child("io");
        if (const json* d = io.get("out_dir")) {
            if (!d->is_string()) io.fail("out_dir", "expected a string");
            cfg.out_dir = d->get<std::string>();
        }
        io.finish();
    }
    root.finish();
    refresh_effective(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.sampling.seed = seed;
    cfg.verify.seed = seed;
    refresh_effective(cfg);
}

}  // namespace dck::cli
