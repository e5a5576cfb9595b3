#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <jetgroupoid/cases.hpp>
#include <jetgroupoid/confluence.hpp>
#include <jetgroupoid/orbitprobe.hpp>
#include <jetgroupoid/prolong.hpp>
#include <jetgroupoid/system.hpp>

namespace jetgroupoid::cli
{

inline constexpr const char *version = "0.1.0";

using json = nlohmann::json;

struct Options
{
    std::string path;
    std::uint64_t seed{1};
    std::vector<std::string> pins;
    unsigned order{1};
    unsigned degree{3};
    std::optional<std::size_t> points;
    std::size_t iters{200};
    std::size_t steps{1};
    unsigned jobs{0};
    unsigned trials{40};
    bool strict{false};
    bool timings{false};
    std::string param;
    std::string at{"0"};
    unsigned b_shift{3};
};

struct Outcome
{
    int exit_code{0};
    json report;
    std::string text; // non-JSON output (generate)
};

inline std::uint64_t default_seed()
{
    if (const char *env = std::getenv("JETGROUPOID_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception &) {
            throw UsageError(std::string("JETGROUPOID_SEED is not an integer: ") + env);
        }
    }
    return 1;
}

inline std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Seeded random rational pin in [1, 10^6] for `--pin name` without a value.
inline mpq_class random_pin(std::uint64_t seed, const std::string &name)
{
    std::mt19937_64 rng(derive_seed(seed ^ 0x636c6970ULL, detail::name_hash(name)));
    return mpq_class(static_cast<unsigned long>(rng() % 1000000 + 1));
}

// `name=value`, `name` (seeded random), comma-separated lists of either.
inline FiberedSystem apply_pins(const FiberedSystem &sys, const std::vector<std::string> &pins, std::uint64_t seed)
{
    std::map<std::string, mpq_class> values;
    for (const auto &arg : pins) {
        std::stringstream ss(arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) {
                continue;
            }
            const auto eq = item.find('=');
            const std::string name = item.substr(0, eq);
            if (!sys.is_param(name)) {
                throw UsageError("--pin: '" + name + "' is not a parameter");
            }
            values[name] = eq == std::string::npos ? random_pin(seed, name) : parse_rational(item.substr(eq + 1));
        }
    }
    return bind_parameters(sys, values);
}

inline FiberedSystem load_system(const Options &opt)
{
    return apply_pins(parse_system(read_file(opt.path)), opt.pins, opt.seed);
}

inline json header(const FiberedSystem &sys, const Options &opt, std::uint64_t modulus)
{
    json r;
    r["version"] = version;
    r["system"] = sys.name;
    r["seed"] = opt.seed;
    r["modulus"] = modulus;
    return r;
}

inline json bindings_json(const FiberedSystem &sys)
{
    json b = json::object();
    for (const auto &[p, v] : sys.bindings) {
        b[p] = v.get_str();
    }
    return b;
}

inline Outcome cmd_check(const Options &opt)
{
    const auto sys = parse_system(read_file(opt.path));
    Outcome out;
    json &r = out.report;
    r["version"] = version;
    r["system"] = sys.name;
    r["base"] = sys.base;
    r["fiber"] = sys.fiber;
    r["params"] = sys.params;
    r["bindings"] = bindings_json(sys);
    json comps = json::object();
    for (std::size_t i = 0; i < sys.base.size(); ++i) {
        comps[sys.base[i]] = to_string(sys.sigma[i]);
    }
    for (std::size_t i = 0; i < sys.fiber.size(); ++i) {
        comps[sys.fiber[i]] = to_string(sys.map[i]);
    }
    r["components"] = comps;
    try {
        const auto v = validate_fibered(sys, opt.seed);
        r["fibered"] = v.fibered;
        r["jacobian_probably_singular"] = v.jacobian_probably_singular;
        r["warnings"] = v.warnings;
    } catch (const FiberednessViolation &e) {
        r["fibered"] = false;
        r["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        out.exit_code = 1;
    }
    return out;
}

inline json frame_json(const FiberedSystem &sys, const FrameJet<PrimeField> &r, unsigned k)
{
    const auto ctx = JetContext::of(sys, k);
    json j;
    json base = json::object();
    for (std::size_t b = 0; b < sys.base.size(); ++b) {
        base[sys.base[b]] = r.base()[b];
    }
    j["base"] = base;
    json jets = json::object();
    for (unsigned i = 0; i < ctx.q(); ++i) {
        const auto &s = r.components()[i];
        const auto &lay = s.layout();
        for (std::size_t a = 0; a < lay.size(); ++a) {
            jets[ctx.name(JetVar::jet(i, lay.at(a)))] = s.jet_coordinate(lay.at(a));
        }
    }
    j["jets"] = jets;
    return j;
}

// One random order-k frame over F_p and its image under R_k Phi.
inline Outcome cmd_prolong(const Options &opt)
{
    const auto sys = load_system(opt);
    const auto field = probe_field(opt.seed);
    const auto params = probe_parameters(sys, field, opt.seed);
    std::mt19937_64 rng(derive_seed(opt.seed, 0x70726f6cULL));
    const unsigned q = static_cast<unsigned>(sys.fiber.size());
    for (unsigned attempt = 0; attempt <= max_pole_resamples; ++attempt) {
        Point<PrimeField> base;
        for (std::size_t j = 0; j < sys.base.size(); ++j) {
            base.push_back(field.random(rng));
        }
        SeriesTuple<PrimeField> comps;
        for (unsigned i = 0; i < q; ++i) {
            TruncatedSeries<PrimeField> s(field, q, opt.order);
            for (std::size_t c = 0; c < s.coefficients().size(); ++c) {
                s[c] = field.random(rng);
            }
            comps.push_back(std::move(s));
        }
        try {
            const FrameJet<PrimeField> r(base, comps);
            const auto image = prolong_map(sys, r, opt.order, params);
            Outcome out;
            out.report = header(sys, opt, field.modulus());
            out.report["k"] = opt.order;
            out.report["frame"] = frame_json(sys, r, opt.order);
            out.report["image"] = frame_json(sys, image, opt.order);
            json pv = json::object();
            for (const auto &[p, v] : params) {
                pv[p] = v;
            }
            out.report["parameters"] = pv;
            return out;
        } catch (const IndeterminacyPoint &) {
        } catch (const DegenerateImage &) {
        } catch (const SingularLinearPart &) {
        }
    }
    throw PoleSaturated("no usable random frame found");
}

// Flattened j_k(Phi^n) at a seeded random point.
inline Outcome cmd_iterate(const Options &opt)
{
    const auto sys = load_system(opt);
    const auto field = probe_field(opt.seed);
    const auto params = probe_parameters(sys, field, opt.seed);
    std::mt19937_64 rng(derive_seed(opt.seed, 0x69746572ULL));
    Point<PrimeField> base;
    Point<PrimeField> fiber;
    for (std::size_t j = 0; j < sys.base.size(); ++j) {
        base.push_back(field.random(rng));
    }
    for (std::size_t j = 0; j < sys.fiber.size(); ++j) {
        fiber.push_back(field.random(rng));
    }
    const auto jet = taylor_jet_of_iterate(sys, field, base, fiber, opt.steps, opt.order, params);
    const auto names = jet_coordinate_names(sys, opt.order);
    const auto flat = jet.flatten();
    Outcome out;
    out.report = header(sys, opt, field.modulus());
    out.report["k"] = opt.order;
    out.report["n"] = opt.steps;
    json coords = json::array();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        coords.push_back({names.at(i), flat[i]});
    }
    out.report["jet"] = coords;
    return out;
}

inline ProbeOptions probe_options(const FiberedSystem &sys, const Options &opt)
{
    ProbeOptions p;
    p.sampling.k = opt.order;
    p.sampling.max_iter = opt.iters;
    p.sampling.seed = opt.seed;
    p.sampling.jobs = opt.jobs;
    p.sampling.num_points =
        opt.points ? *opt.points
                   : recommended_points(jet_coordinate_names(sys, opt.order).size(), opt.degree, opt.iters);
    p.d_max = opt.degree;
    p.strict = false;
    return p;
}

inline json profile_json(const DimensionEstimate &e)
{
    json prof = json::array();
    for (const auto &pt : e.profile.points) {
        prof.push_back({pt.d, pt.value});
    }
    return prof;
}

inline json estimate_json(const DimensionEstimate &e)
{
    json r;
    r["estimate"] = e.estimate;
    r["confidence"] = e.confidence();
    r["lower"] = e.lower;
    r["upper"] = e.upper;
    r["jacobian_dim"] = e.jacobian_dim;
    r["witness_dim"] = e.witness_dim;
    r["profile_bound"] = e.profile_bound;
    r["ambient"] = e.ambient;
    r["relations"] = e.relation_count;
    r["profile"] = profile_json(e);
    r["differences"] = e.differences();
    bool saturated = true;
    for (const auto &pt : e.profile.points) {
        saturated = saturated && pt.saturated;
    }
    r["saturated"] = saturated;
    return r;
}

inline long elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since).count());
}

inline Outcome cmd_dimension(const Options &opt)
{
    const auto start = std::chrono::steady_clock::now();
    const auto sys = load_system(opt);
    const auto popt = probe_options(sys, opt);
    const auto sample = sample_orbit_jets(sys, popt.sampling);
    const auto est = estimate_dimension(sample, popt.d_max, false);
    Outcome out;
    out.report = header(sys, opt, sample.modulus);
    out.report.update(estimate_json(est));
    out.report["k"] = opt.order;
    out.report["degree"] = opt.degree;
    out.report["points"] = popt.sampling.num_points;
    out.report["iters"] = opt.iters;
    out.report["bindings"] = bindings_json(sys);
    if (opt.timings) {
        out.report["wall_time_ms"] = elapsed_ms(start);
    }
    if (opt.strict && !est.high_confidence) {
        out.exit_code = 1;
    }
    return out;
}

inline Outcome cmd_relations(const Options &opt)
{
    const auto start = std::chrono::steady_clock::now();
    const auto sys = load_system(opt);
    const auto popt = probe_options(sys, opt);
    const auto sample = sample_orbit_jets(sys, popt.sampling);
    const auto rep = discover_relations(sample, opt.degree);
    Outcome out;
    out.report = header(sys, opt, sample.modulus);
    out.report["k"] = opt.order;
    out.report["degree"] = opt.degree;
    out.report["points"] = popt.sampling.num_points;
    out.report["iters"] = opt.iters;
    out.report["coordinates"] = sample.coordinates;
    out.report["discarded"] = rep.discarded;
    out.report["fit_rows"] = rep.fit_rows;
    out.report["holdout_rows"] = rep.holdout_rows;
    out.report["failure_bound_log10"] = rep.failure_bound_log10();
    json rels = json::array();
    for (const auto &r : rep.relations) {
        json terms = json::array();
        for (const auto &[mono, c] : r.terms()) {
            json m = json::array();
            for (const auto &[v, e] : mono) {
                m.push_back({sample.coordinates.at(v), e});
            }
            terms.push_back({{"coefficient", c}, {"monomial", m}});
        }
        rels.push_back({{"terms", terms}, {"text", to_string(r, sample.coordinates)}});
    }
    out.report["relations"] = rels;
    if (opt.timings) {
        out.report["wall_time_ms"] = elapsed_ms(start);
    }
    return out;
}

inline Outcome cmd_confluence(const Options &opt)
{
    const auto sys = load_system(opt);
    if (opt.param.empty()) {
        throw UsageError("confluence needs --param");
    }
    const auto family = make_family(sys, opt.param, parse_rational(opt.at));
    Outcome out;
    out.report["version"] = version;
    out.report["system"] = sys.name;
    out.report["parameter"] = opt.param;
    out.report["at"] = family.special_value.get_str();
    try {
        const auto res = extract_vector_field(family);
        json comps = json::array();
        for (std::size_t i = 0; i < res.field.base.size(); ++i) {
            comps.push_back({res.field.base[i], to_string(res.field.base_components[i])});
        }
        for (std::size_t i = 0; i < res.field.fiber.size(); ++i) {
            comps.push_back({res.field.fiber[i], to_string(res.field.fiber_components[i])});
        }
        for (const auto &p : res.params) {
            comps.push_back({p, "0"});
        }
        out.report["field"] = comps;
        out.report["identity_at_special"] = true;
        out.report["remainder_second_order"] = res.remainder_second_order;
        if (!res.remainder_second_order) {
            out.exit_code = 1;
        }
    } catch (const NotIdentityAtSpecialValue &e) {
        out.report["identity_at_special"] = false;
        out.report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        out.exit_code = 1;
    } catch (const PoleAtSpecialValue &e) {
        out.report["identity_at_special"] = false;
        out.report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        out.exit_code = 1;
    }
    return out;
}

inline Outcome cmd_specialise(const Options &opt)
{
    const auto start = std::chrono::steady_clock::now();
    const auto sys = load_system(opt);
    if (opt.param.empty()) {
        throw UsageError("specialise needs --param");
    }
    const auto family = make_family(sys, opt.param, parse_rational(opt.at));
    const auto popt = probe_options(family.system, opt);
    const auto rep = compare_specialisation(family, popt);
    Outcome out;
    out.report = header(sys, opt, rep.special.modulus);
    out.report["parameter"] = opt.param;
    out.report["at"] = family.special_value.get_str();
    out.report["k"] = opt.order;
    out.report["degree"] = opt.degree;
    out.report["iters"] = opt.iters;
    out.report["generic"] = estimate_json(rep.generic);
    out.report["special"] = estimate_json(rep.special);
    out.report["relative_generic"] = rep.relative_generic;
    out.report["verdict"] = rep.verdict();
    if (opt.timings) {
        out.report["wall_time_ms"] = elapsed_ms(start);
    }
    if (rep.verdict() == "FAIL" || (opt.strict && !(rep.generic.high_confidence && rep.special.high_confidence))) {
        out.exit_code = 1;
    }
    return out;
}

// System files derived from the built-in cases.
inline Outcome cmd_generate(const std::string &what, const Options &opt)
{
    Outcome out;
    if (what == "dp2-confluence") {
        const auto fam = cases::dp2_confluence_family(opt.b_shift);
        out.text = "# Generated by: jetgroupoid generate dp2-confluence\n" + print_system(fam.system);
    } else if (what == "dp2") {
        out.text = cases::dp2_text;
    } else {
        throw UsageError("unknown generator '" + what + "' (expected dp2 or dp2-confluence)");
    }
    return out;
}

// Exit code for an error escaping a command.
inline int exit_code_for(const Error &e)
{
    const std::string kind = e.kind();
    return kind == "IoError" || kind == "UsageError" ? 2 : 1;
}

} // namespace jetgroupoid::cli
