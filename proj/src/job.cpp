#include "locsym/job.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <new>
#include <ostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "locsym/summation.hpp"

namespace locsym {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- config parsing -------------------------------------------------------

double get_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
    return j.get<int>();
}

std::vector<double> get_numbers(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    }
}

Rational parse_rational_string(const std::string& s, const std::string& ctx) {
    static const std::regex re(R"(\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+))?\s*)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ConfigError(ctx + ": cannot parse '" + s + "' as an integer or p/q");
    const BigInt p(m[1].str());
    const BigInt q(m[2].matched ? m[2].str() : std::string("1"));
    if (q == 0) throw ConfigError(ctx + ": zero denominator in '" + s + "'");
    return Rational(p, q);
}

Rational parse_exact_entry(const json& v, const std::string& ctx) {
    if (v.is_number_integer()) {
        return v.is_number_unsigned() ? Rational(BigInt(v.get<unsigned long long>())) : Rational(v.get<long long>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9007199254740992.0) return Rational(static_cast<long long>(d));
        throw ConfigError(ctx + ": non-integral float entry in exact arithmetic (write it as \"p/q\")");
    }
    if (v.is_string()) return parse_rational_string(v.get<std::string>(), ctx);
    throw ConfigError(ctx + ": matrix entry must be a number or a \"p/q\" string");
}

double parse_float_entry(const json& v, const std::string& ctx) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return static_cast<double>(parse_rational_string(v.get<std::string>(), ctx));
    throw ConfigError(ctx + ": matrix entry must be a number or a \"p/q\" string");
}

// One block per factor; a single-factor group also accepts a bare matrix.
GroupElement parse_element(const json& j, const GroupSpec& spec, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ConfigError(name + ": expected a matrix or a list of blocks");
    json blocks = j;
    const bool bare = j[0].is_array() && !j[0].empty() && !j[0][0].is_array();
    if (bare) blocks = json::array({j});
    if (blocks.size() != spec.factors.size())
        throw ConfigError(name + ": expected " + std::to_string(spec.factors.size()) + " blocks, got " + std::to_string(blocks.size()));
    const bool exact = spec.arithmetic != Arithmetic::Float;
    GroupElement::ExactBlocks eb;
    GroupElement::FloatBlocks fb;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const int n = spec.factors[b].n;
        const auto& m = blocks[b];
        const std::string bctx = name + " block " + std::to_string(b);
        if (!m.is_array() || static_cast<int>(m.size()) != n) throw ConfigError(bctx + ": expected " + std::to_string(n) + " rows");
        std::vector<Rational> er;
        std::vector<double> fr;
        for (int r = 0; r < n; ++r) {
            const auto& row = m[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw ConfigError(bctx + ": row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
            for (int c = 0; c < n; ++c) {
                const std::string ectx = bctx + " entry (" + std::to_string(r) + "," + std::to_string(c) + ")";
                if (exact) er.push_back(parse_exact_entry(row[static_cast<std::size_t>(c)], ectx));
                else fr.push_back(parse_float_entry(row[static_cast<std::size_t>(c)], ectx));
            }
        }
        if (exact) eb.emplace_back(n, std::move(er));
        else fb.emplace_back(n, std::move(fr));
    }
    GroupElement g = exact ? GroupElement(spec, std::move(eb)) : GroupElement(spec, std::move(fb));
    try {
        g.validate();
    } catch (const Error& e) {
        if (e.code() == ExitCode::ConfigError) throw ConfigError(name + ": " + e.what());
        throw;
    }
    return g;
}

GroupSpec parse_group(const json& j) {
    if (!j.is_object()) throw ConfigError("group: expected an object");
    reject_unknown(j, {"factors", "arithmetic"}, "group");
    GroupSpec spec;
    if (!j.contains("factors") || !j["factors"].is_array()) throw ConfigError("group.factors: expected an array");
    for (std::size_t i = 0; i < j["factors"].size(); ++i) {
        const auto& f = j["factors"][i];
        const std::string ctx = "group.factors[" + std::to_string(i) + "]";
        FactorSpec fs;
        if (f.is_number_integer()) {
            fs.n = f.get<int>();
        } else if (f.is_object()) {
            reject_unknown(f, {"type", "n"}, ctx);
            if (f.contains("type")) {
                if (!f["type"].is_string()) throw ConfigError(ctx + ".type: expected a string");
                fs.type = f["type"].get<std::string>();
            }
            if (!f.contains("n")) throw ConfigError(ctx + ": missing n");
            fs.n = get_int(f["n"], ctx + ".n");
        } else {
            throw ConfigError(ctx + ": expected an integer or {\"type\", \"n\"}");
        }
        spec.factors.push_back(fs);
    }
    if (j.contains("arithmetic")) {
        if (!j["arithmetic"].is_string()) throw ConfigError("group.arithmetic: expected a string");
        spec.arithmetic = parse_arithmetic(j["arithmetic"].get<std::string>());
    }
    spec.validate();
    return spec;
}

HeatBoundParams parse_heat_case_entry(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    reject_unknown(j, {"case", "s", "s1", "s2", "eps"}, ctx);
    if (!j.contains("case") || !j["case"].is_string()) throw ConfigError(ctx + ".case: expected \"i\", \"ii\" or \"iii\"");
    HeatBoundParams p;
    p.which = parse_heat_case(j["case"].get<std::string>());
    if (j.contains("s")) p.s = get_number(j["s"], ctx + ".s");
    if (j.contains("s1")) p.s1 = get_number(j["s1"], ctx + ".s1");
    if (j.contains("s2")) p.s2 = get_number(j["s2"], ctx + ".s2");
    if (j.contains("eps")) p.eps = get_number(j["eps"], ctx + ".eps");
    return p;
}

// ---- output ---------------------------------------------------------------

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : path_(path), os_(path, std::ios::binary) {
        if (!os_) throw ConfigError("cannot write " + path.string());
        os_ << header << '\n';
    }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
        os_ << '\n';
    }
    const fs::path& path() const { return path_; }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
    static std::string cell(I v) { return std::to_string(v); }

    fs::path path_;
    std::ofstream os_;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json estimate_json(const ExponentEstimate& e) {
    return {{"value", e.value}, {"window", {e.window_lo, e.window_hi}}, {"residual", e.residual},
            {"points", e.points}, {"complete", e.complete}, {"out_of_range", e.out_of_range}};
}

json interval_json(const Interval& i) { return json::array({i.lower, i.upper}); }

std::vector<double> default_zetas(double rho) {
    std::vector<double> z;
    for (int i = 1; 0.05 * i <= 2 * rho + 1e-9; ++i) z.push_back(i / 20.0);
    return z;
}

// Parameters strictly inside each admissible range, for the estimated delta''.
std::vector<HeatBoundParams> default_heat_cases(double rho, double ds) {
    std::vector<HeatBoundParams> out;
    if (ds < rho) {
        HeatBoundParams p;
        p.which = HeatCase::I;
        p.s = 0.5 * (ds + rho);
        out.push_back(p);
    }
    if (rho <= ds && ds < 2 * rho) {
        HeatBoundParams p;
        p.which = HeatCase::II;
        const double lo = ds - rho;
        p.s1 = lo + (rho - lo) / 3;
        p.s2 = lo + 2 * (rho - lo) / 3;
        out.push_back(p);
    }
    if (ds < 2 * rho) {
        HeatBoundParams p;
        p.which = HeatCase::III;
        p.s = ds + 0.1;
        p.eps = 0.05;
        out.push_back(p);
    }
    return out;
}

json heat_params_json(const HeatBoundParams& p) {
    json j{{"case", to_string(p.which)}};
    switch (p.which) {
    case HeatCase::I: j["s"] = p.s; break;
    case HeatCase::II: j["s1"] = p.s1; j["s2"] = p.s2; break;
    case HeatCase::III: j["s"] = p.s; j["eps"] = p.eps; break;
    }
    return j;
}

GroupElement random_word(const GeneratorSet& gens, std::mt19937_64& rng, int max_length) {
    const auto& letters = gens.closure();
    GroupElement g = GroupElement::identity(gens.spec());
    if (letters.empty()) return g;
    std::uniform_int_distribution<int> len(1, std::max(1, max_length));
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    const int l = len(rng);
    for (int i = 0; i < l; ++i) g = g * letters[pick(rng)];
    return g;
}

} // namespace

// ---- public ---------------------------------------------------------------

std::vector<std::string> resolve_analyses(const std::vector<std::string>& requested) {
    std::set<std::string> want(requested.begin(), requested.end());
    for (const auto& a : want)
        if (std::find(kAnalyses.begin(), kAnalyses.end(), a) == kAnalyses.end()) throw ConfigError("unknown analysis '" + a + "'");
    want.insert({"orbit", "count", "exponent", "lambda0"});
    if (want.count("heatbound")) want.insert("exponent");
    std::vector<std::string> out;
    for (const auto& a : kAnalyses)
        if (want.count(a)) out.push_back(a);
    return out;
}

JobConfig parse_job_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(j, {"group", "generators", "max_word_length", "radii_step", "window_fraction", "base_points", "analyses",
                       "max_elements", "volume", "green", "heatbound", "project", "series"},
                   "config");
    JobConfig cfg;
    if (!j.contains("group")) throw ConfigError("config: missing group");
    cfg.group = parse_group(j["group"]);

    if (j.contains("generators")) {
        const auto& g = j["generators"];
        if (!g.is_array()) throw ConfigError("generators: expected an array");
        for (std::size_t i = 0; i < g.size(); ++i) cfg.generators.push_back(parse_element(g[i], cfg.group, "generator " + std::to_string(i)));
    }
    if (j.contains("max_word_length")) cfg.max_word_length = get_int(j["max_word_length"], "max_word_length");
    else if (cfg.generators.empty()) cfg.max_word_length = 1;
    else throw ConfigError("max_word_length is required when generators are given");
    if (cfg.max_word_length < 1) throw ConfigError("max_word_length must be >= 1");

    if (j.contains("radii_step")) cfg.radii_step = get_number(j["radii_step"], "radii_step");
    if (!(cfg.radii_step > 0)) throw ConfigError("radii_step must be positive");
    if (j.contains("window_fraction")) cfg.window_fraction = get_number(j["window_fraction"], "window_fraction");
    if (!(cfg.window_fraction >= 0 && cfg.window_fraction < 1)) throw ConfigError("window_fraction must lie in [0, 1)");
    if (j.contains("max_elements")) {
        const double m = get_number(j["max_elements"], "max_elements");
        if (!(m >= 1)) throw ConfigError("max_elements must be >= 1");
        cfg.max_elements = static_cast<std::size_t>(m);
    }

    if (j.contains("base_points")) {
        const auto& b = j["base_points"];
        if (!b.is_object()) throw ConfigError("base_points: expected an object with x and/or y");
        reject_unknown(b, {"x", "y"}, "base_points");
        GroupSpec fspec = cfg.group;
        fspec.arithmetic = Arithmetic::Float;
        const auto e = GroupElement::identity(fspec);
        cfg.x = b.contains("x") ? parse_element(b["x"], fspec, "base point x") : e;
        cfg.y = b.contains("y") ? parse_element(b["y"], fspec, "base point y") : e;
    }

    std::vector<std::string> req;
    if (j.contains("analyses")) {
        if (!j["analyses"].is_array()) throw ConfigError("analyses: expected an array of names");
        for (const auto& a : j["analyses"]) {
            if (!a.is_string()) throw ConfigError("analyses: expected strings");
            req.push_back(a.get<std::string>());
        }
    }
    cfg.analyses = resolve_analyses(req);

    if (j.contains("volume")) {
        const auto& v = j["volume"];
        reject_unknown(v, {"kinds", "small_radii", "large_radii", "relative_tolerance"}, "volume");
        if (v.contains("kinds")) {
            cfg.volume.kinds.clear();
            for (const auto& k : v["kinds"]) {
                const std::string s = k.is_string() ? k.get<std::string>() : "";
                if (s == "polyhedral") cfg.volume.kinds.push_back(BallKind::Polyhedral);
                else if (s == "classical") cfg.volume.kinds.push_back(BallKind::Classical);
                else throw ConfigError("volume.kinds: expected \"polyhedral\" or \"classical\"");
            }
        }
        if (v.contains("small_radii")) cfg.volume.small_radii = get_numbers(v["small_radii"], "volume.small_radii");
        if (v.contains("large_radii")) cfg.volume.large_radii = get_numbers(v["large_radii"], "volume.large_radii");
        if (v.contains("relative_tolerance")) cfg.volume.relative_tolerance = get_number(v["relative_tolerance"], "volume.relative_tolerance");
    }
    if (j.contains("green")) {
        const auto& g = j["green"];
        reject_unknown(g, {"zeta", "zeta_min", "zeta_max", "zeta_step"}, "green");
        if (g.contains("zeta")) cfg.green.zetas = get_numbers(g["zeta"], "green.zeta");
        if (g.contains("zeta_step")) {
            const double lo = g.contains("zeta_min") ? get_number(g["zeta_min"], "green.zeta_min") : 0.05;
            const double hi = g.contains("zeta_max") ? get_number(g["zeta_max"], "green.zeta_max") : 1.5;
            const double st = get_number(g["zeta_step"], "green.zeta_step");
            if (!(st > 0 && lo > 0 && hi >= lo)) throw ConfigError("green: need 0 < zeta_min <= zeta_max and zeta_step > 0");
            for (int i = 0; lo + st * i <= hi + 1e-9; ++i) cfg.green.zetas.push_back(std::round((lo + st * i) * 1e9) / 1e9);
        }
        for (double z : cfg.green.zetas)
            if (!(z > 0)) throw ConfigError("green.zeta: values must be positive");
    }
    if (j.contains("heatbound")) {
        const auto& h = j["heatbound"];
        reject_unknown(h, {"cases", "t", "D"}, "heatbound");
        if (h.contains("cases")) {
            if (!h["cases"].is_array()) throw ConfigError("heatbound.cases: expected an array");
            for (std::size_t i = 0; i < h["cases"].size(); ++i)
                cfg.heat.cases.push_back(parse_heat_case_entry(h["cases"][i], "heatbound.cases[" + std::to_string(i) + "]"));
        }
        if (h.contains("t")) cfg.heat.times = get_numbers(h["t"], "heatbound.t");
        for (double t : cfg.heat.times)
            if (!(t > 0)) throw ConfigError("heatbound.t: values must be positive");
        if (h.contains("D")) cfg.heat.D = get_number(h["D"], "heatbound.D");
    }
    if (j.contains("project")) {
        const auto& p = j["project"];
        reject_unknown(p, {"elements", "samples", "max_length"}, "project");
        if (p.contains("elements")) {
            GroupSpec fspec = cfg.group;
            fspec.arithmetic = Arithmetic::Float;
            for (std::size_t i = 0; i < p["elements"].size(); ++i) {
                const std::string name = "element " + std::to_string(i);
                cfg.project.elements.emplace_back(name, parse_element(p["elements"][i], fspec, "project " + name));
            }
        }
        if (p.contains("samples")) cfg.project.samples = get_int(p["samples"], "project.samples");
        if (p.contains("max_length")) cfg.project.max_length = get_int(p["max_length"], "project.max_length");
        if (cfg.project.samples < 0 || cfg.project.max_length < 1) throw ConfigError("project: need samples >= 0 and max_length >= 1");
    }
    if (j.contains("series")) {
        const auto& s = j["series"];
        reject_unknown(s, {"relative_tail", "use_decay_ratio"}, "series");
        if (s.contains("relative_tail")) cfg.series.relative_tail = get_number(s["relative_tail"], "series.relative_tail");
        if (s.contains("use_decay_ratio")) {
            if (!s["use_decay_ratio"].is_boolean()) throw ConfigError("series.use_decay_ratio: expected a boolean");
            cfg.series.use_decay_ratio = s["use_decay_ratio"].get<bool>();
        }
    }
    return cfg;
}

JobConfig load_job_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_job_config(j);
}

json run_job(const JobConfig& cfg, const RunOptions& opts, std::ostream& log) {
    fs::create_directories(opts.out_dir);
    auto has = [&](const char* a) { return std::find(cfg.analyses.begin(), cfg.analyses.end(), a) != cfg.analyses.end(); };
    const auto rs = build_root_system(cfg.group);
    const TorsionPolicy torsion = opts.include_torsion ? TorsionPolicy::Include : TorsionPolicy::Exclude;
    std::vector<std::string> files;

    json report;
    json group = json::array();
    for (const auto& f : cfg.group.factors) group.push_back({{"type", f.type}, {"n", f.n}});
    report["group"] = {{"factors", group}, {"arithmetic", to_string(cfg.group.arithmetic)}, {"rank", rs.rank},
                       {"ambient_dim", rs.ambient_dim}, {"dim_x", rs.dim_x}, {"rho", rs.rho},
                       {"rho_norm", rs.rho_norm}, {"rho_min", rs.rho_min}, {"positive_roots", rs.positive_roots.size()}};
    report["config"] = {{"generators", cfg.generators.size()}, {"max_word_length", cfg.max_word_length},
                        {"radii_step", cfg.radii_step}, {"window_fraction", cfg.window_fraction},
                        {"analyses", cfg.analyses}, {"include_torsion_in_counting", opts.include_torsion},
                        {"seed", opts.seed}, {"base_points", cfg.x.has_value()}};

    const GeneratorSet gens(cfg.group, cfg.generators);

    if (has("project")) {
        CsvWriter csv(opts.out_dir / "projections.csv", "element,coordinate,value");
        std::vector<std::pair<std::string, GroupElement>> items;
        for (std::size_t i = 0; i < cfg.generators.size(); ++i) items.emplace_back("generator " + std::to_string(i), cfg.generators[i]);
        for (const auto& e : cfg.project.elements) items.push_back(e);
        std::mt19937_64 rng(opts.seed);
        for (int i = 0; i < cfg.project.samples; ++i) items.emplace_back("sample " + std::to_string(i), random_word(gens, rng, cfg.project.max_length));
        json out = json::array();
        for (const auto& [name, g] : items) {
            const auto h = cartan_projection(g);
            for (std::size_t k = 0; k < h.size(); ++k) csv.row(name, k, h[k]);
            out.push_back({{"element", name}, {"H", std::vector<double>(h.coords().begin(), h.coords().end())},
                           {"d", h.norm()}, {"dprime", h.dot(rs.rho) / rs.rho_norm}});
        }
        report["projections"] = out;
        files.push_back(csv.path().filename().string());
    }

    EnumerateOptions eo;
    eo.max_elements = cfg.max_elements;
    eo.threads = opts.threads;
    const OrbitBall ball = enumerate(gens, cfg.max_word_length, eo);
    const OrbitGeometry geom = cfg.x ? OrbitGeometry(ball, rs, *cfg.x, *cfg.y, torsion, opts.threads) : OrbitGeometry(ball, rs, torsion);
    {
        CsvWriter csv(opts.out_dir / "orbit_levels.csv", "word_length,new_elements,cumulative");
        std::size_t cum = 0;
        for (int w = 0; w <= ball.max_word_length(); ++w) {
            const std::size_t c = ball.level_end(w) - ball.level_begin(w);
            cum += c;
            csv.row(w, c, cum);
        }
        files.push_back(csv.path().filename().string());
        const auto tr = geom.trust_radius(DistanceKind::d());
        report["orbit"] = {{"size", ball.size()}, {"max_word_length", ball.max_word_length()}, {"storage", ball.storage_name()},
                           {"promoted_to_bigint", ball.promoted_to_bigint()},
                           {"trust_radius", tr ? finite_or_null(*tr) : json(nullptr)},
                           {"finite_or_trivial", tr && std::isinf(*tr)}};
        log << "orbit: " << ball.size() << " elements to word length " << ball.max_word_length() << " (" << ball.storage_name() << ")\n";
    }

    {
        CsvWriter csv(opts.out_dir / "counting.csv", "distance,radius,count,complete");
        for (auto kind : {DistanceKind::d(), DistanceKind::dprime()}) {
            const auto tr = geom.trust_radius(kind);
            double rmax = 0.0;
            if (tr && std::isfinite(*tr)) {
                rmax = *tr;
            } else {
                for (std::size_t i = 0; i < geom.size(); ++i) rmax = std::max(rmax, geom.distance(kind, i));
                rmax += cfg.radii_step;
            }
            const auto curve = counting_function(geom, kind, radii_grid(cfg.radii_step, rmax));
            for (const auto& s : curve.samples) csv.row(kind.label(), s.radius, s.count, s.complete ? 1 : 0);
        }
        files.push_back(csv.path().filename().string());
    }

    ExponentOptions xo;
    xo.radii_step = cfg.radii_step;
    xo.window_fraction = cfg.window_fraction;
    xo.series = cfg.series;
    const ExponentTriple triple = exponent_triple(geom, xo);
    report["exponents"] = {{"delta", estimate_json(triple.delta)}, {"delta_prime", estimate_json(triple.delta_prime)},
                           {"delta_second", {{"value", triple.delta_second}, {"bracket", {triple.bracket_lo, triple.bracket_hi}}}},
                           {"trivial", triple.trivial}, {"ordered", triple.ordered}, {"notes", triple.notes}};
    {
        CsvWriter csv(opts.out_dir / "poincare.csv", "family,s,word_length,level_sum,partial_sum");
        const std::pair<DistanceKind::Type, double> fams[] = {{DistanceKind::Type::D, triple.delta.value},
                                                               {DistanceKind::Type::DPrime, triple.delta_prime.value},
                                                               {DistanceKind::Type::DSecond, triple.delta_second}};
        for (const auto& [fam, s] : fams) {
            if (!(s > 0)) continue; // trivial group: every exponent is 0
            const auto levels = poincare_level_sums(geom, fam, s);
            const std::string name = fam == DistanceKind::Type::D ? "d" : fam == DistanceKind::Type::DPrime ? "dprime" : "dsecond";
            CompensatedSum acc;
            for (std::size_t w = 0; w < levels.size(); ++w) {
                acc.add(levels[w]);
                csv.row(name, s, w, levels[w], acc.value());
            }
        }
        files.push_back(csv.path().filename().string());
    }
    log << "exponents: delta " << fmt(triple.delta.value) << ", delta' " << fmt(triple.delta_prime.value) << ", delta'' "
        << fmt(triple.delta_second) << "\n";

    const auto spec_report = consistency_check({rs.rho_norm, rs.rho_min, triple.delta.value, triple.delta_prime.value, triple.delta_second});
    report["spectrum"] = {
        {"lambda0_exact", spec_report.lambda0_exact ? json(*spec_report.lambda0_exact) : json(nullptr)},
        {"lambda0_interval", interval_json(spec_report.lambda0_interval)},
        {"characterization", spec_report.lambda0_exact ? json(*spec_report.lambda0_exact) : json(nullptr)},
        {"riemannian_bounds", interval_json(spec_report.riemannian_bounds)},
        {"polyhedral_lower_bound", spec_report.polyhedral_lower},
        {"combined_bounds", interval_json(spec_report.combined_bounds)},
        {"inputs", {{"rho_norm", rs.rho_norm}, {"rho_min", rs.rho_min}, {"delta", triple.delta.value},
                    {"delta_prime", triple.delta_prime.value}, {"delta_second", triple.delta_second}, {"tolerance", spec_report.inputs.tolerance}}},
        {"theorem_tags", spec_report.theorem_tags},
        {"consistent", spec_report.consistent},
        {"warnings", spec_report.warnings},
        {"violations", spec_report.violations}};
    log << "lambda0: " << fmt(*spec_report.lambda0_exact) << " in [" << fmt(spec_report.lambda0_interval.lower) << ", "
        << fmt(spec_report.lambda0_interval.upper) << "], " << (spec_report.consistent ? "consistent" : "INCONSISTENT") << "\n";

    if (has("volume")) {
        CsvWriter csv(opts.out_dir / "volume.csv", "ball,regime,radius,volume,log_volume");
        QuadratureOptions qo;
        qo.relative_tolerance = cfg.volume.relative_tolerance;
        json fits = json::array();
        for (auto kind : cfg.volume.kinds) {
            for (auto regime : {VolumeRegime::Small, VolumeRegime::Large}) {
                const auto& radii = regime == VolumeRegime::Small ? cfg.volume.small_radii : cfg.volume.large_radii;
                const auto fit = fit_ball_volume(rs, kind, regime, radii, qo);
                for (std::size_t i = 0; i < fit.radii.size(); ++i)
                    csv.row(to_string(kind), to_string(regime), fit.radii[i], fit.volumes[i], fit.log_volumes[i]);
                json f{{"ball", to_string(kind)}, {"regime", to_string(regime)},
                       {"fitted_polynomial_degree", fit.fitted_polynomial_degree}, {"residual", fit.residual}};
                if (regime == VolumeRegime::Large) {
                    f["fitted_exponential_rate"] = fit.fitted_exponential_rate;
                    f["joint_polynomial_degree"] = fit.joint_polynomial_degree;
                    f["reference_rate"] = 2 * rs.rho_norm;
                    f["reference_degree"] = kind == BallKind::Polyhedral ? rs.rank - 1.0 : 0.5 * (rs.rank - 1);
                } else {
                    f["reference_degree"] = rs.dim_x;
                }
                fits.push_back(f);
            }
        }
        report["volume"] = fits;
        files.push_back(csv.path().filename().string());
    }

    if (has("green")) {
        CsvWriter csv(opts.out_dir / "green.csv", "zeta,word_length,level_sum,partial_sum");
        const auto zetas = cfg.green.zetas.empty() ? default_zetas(rs.rho_norm) : cfg.green.zetas;
        json diags = json::array();
        std::optional<double> last_div, first_conv;
        for (double z : zetas) {
            const auto g = green_series_diagnostic(geom, z, cfg.series);
            for (std::size_t w = 0; w < g.level_sums.size(); ++w) csv.row(z, w, g.level_sums[w], g.partial_sums[w]);
            diags.push_back({{"zeta", z}, {"verdict", to_string(g.verdict)}, {"terms", g.terms}, {"skipped", g.skipped},
                             {"last_ratio", finite_or_null(g.last_ratio)}, {"previous_ratio", finite_or_null(g.previous_ratio)},
                             {"partial_sum", g.partial_sums.empty() ? 0.0 : g.partial_sums.back()}});
            if (g.verdict == SeriesVerdict::Diverging) last_div = z;
            if (g.verdict == SeriesVerdict::Converging && !first_conv && (!last_div || z > *last_div)) first_conv = z;
        }
        report["green"] = {{"diagnostics", diags},
                           {"threshold_estimate", triple.delta_second - rs.rho_norm},
                           {"last_diverging_zeta", last_div ? json(*last_div) : json(nullptr)},
                           {"first_converging_zeta", first_conv ? json(*first_conv) : json(nullptr)}};
        files.push_back(csv.path().filename().string());
    }

    if (has("heatbound")) {
        const double ds = triple.delta_second;
        auto cases = cfg.heat.cases.empty() ? default_heat_cases(rs.rho_norm, ds) : cfg.heat.cases;
        for (const auto& p : cases) {
            try {
                HeatBoundParams q = p;
                q.t = 1.0;
                validate_heat_params(q, rs.rho_norm, ds);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string(e.what()) + " (estimated delta'' = " + fmt(ds) + ")");
            }
        }
        std::optional<OrbitGeometry> gxx, gyy;
        if (cfg.x) {
            gxx.emplace(ball, rs, *cfg.x, *cfg.x, torsion, opts.threads);
            gyy.emplace(ball, rs, *cfg.y, *cfg.y, torsion, opts.threads);
        }
        CsvWriter csv(opts.out_dir / "heatbound.csv", "case,t,log_bound,bound");
        json entries = json::array();
        const double Ddef = heat_default_D(rs);
        for (auto p : cases) {
            p.D = cfg.heat.D;
            const auto terms = heat_bound_terms(p, ds, geom, gxx ? &*gxx : nullptr, gyy ? &*gyy : nullptr);
            json vals = json::array();
            for (double t : cfg.heat.times) {
                p.t = t;
                const double lb = log_heat_bound(p, terms, Ddef);
                csv.row(to_string(p.which), t, lb, std::exp(lb));
                vals.push_back({{"t", t}, {"log_bound", lb}});
            }
            json e = heat_params_json(p);
            if (p.which == HeatCase::I) e["D"] = p.D.value_or(Ddef);
            e["quotient_distance"] = terms.quotient_distance;
            e["psecond_xy"] = terms.p_xy;
            e["psecond_xx"] = terms.p_xx;
            e["psecond_yy"] = terms.p_yy;
            e["values"] = vals;
            e["partial_sums_underestimate"] = true;
            entries.push_back(e);
        }
        report["heatbound"] = entries;
        files.push_back(csv.path().filename().string());
    }

    report["files"] = files;
    {
        std::ofstream os(opts.out_dir / "report.json", std::ios::binary);
        if (!os) throw ConfigError("cannot write " + (opts.out_dir / "report.json").string());
        os << report.dump(2) << '\n';
    }
    log << "wrote report.json";
    for (const auto& f : files) log << ", " << f;
    log << " to " << opts.out_dir.string() << "\n";
    return report;
}

std::string output_tables_help() {
    return R"(Output tables (CSV, 12 significant digits):
  report.json        group data, orbit summary, exponent triple, spectrum report, fits
  orbit_levels.csv   word_length,new_elements,cumulative
  counting.csv       distance,radius,count,complete   (distance: d | dprime)
  poincare.csv       family,s,word_length,level_sum,partial_sum   (s = estimated exponent)
  projections.csv    element,coordinate,value          (analysis "project")
  volume.csv         ball,regime,radius,volume,log_volume   (analysis "volume")
  green.csv          zeta,word_length,level_sum,partial_sum (analysis "green")
  heatbound.csv      case,t,log_bound,bound              (analysis "heatbound")

Exit codes: 0 success, 1 config error, 2 unsupported group, 3 resource cap exceeded,
4 numerical failure.)";
}

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical exponents and bottom-of-spectrum bounds for discrete subgroups of products of SL(n,R)."};
    std::string config;
    std::string out_dir = ".";
    RunOptions opts;
    app.add_option("--config", config, "JSON job configuration")->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--threads", opts.threads, "worker threads for enumeration and geometry")->check(CLI::PositiveNumber);
    app.add_flag("--include-torsion-in-counting", opts.include_torsion, "count elements of Gamma in K (excluded by default)");
    app.add_option("--seed", opts.seed, "seed for sampled projections");
    app.footer(output_tables_help());
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }
    opts.out_dir = out_dir;
    try {
        const auto cfg = load_job_config(config);
        run_job(cfg, opts, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return static_cast<int>(ExitCode::ResourceCapExceeded);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::NumericalFailure);
    }
    return 0;
}

} // namespace locsym
