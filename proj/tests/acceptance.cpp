// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <jetgroupoid/cases.hpp>
#include <jetgroupoid/cli.hpp>
#include <jetgroupoid/confluence.hpp>
#include <jetgroupoid/orbitprobe.hpp>

#include "calibration.hpp"

namespace
{

using namespace jetgroupoid;
using Clock = std::chrono::steady_clock;

struct Check
{
    bool ok{true};
    std::ostringstream notes;

    void require(bool cond, const std::string &what)
    {
        if (!cond) {
            ok = false;
            notes << " [failed: " << what << "]";
        }
    }
};

std::string systems(const std::string &file)
{
    return std::string(JETGROUPOID_SYSTEMS_DIR) + "/" + file;
}

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

void confluence_reproduction(Check &c)
{
    cli::Options opt;
    opt.path = systems("dp2_confluence.sys");
    opt.param = "eps";
    opt.at = "0";
    const auto out = cli::cmd_confluence(opt);
    c.require(out.exit_code == 0, "confluence exit code");
    const auto &field = out.report["field"];
    const std::vector<std::pair<std::string, std::string>> want{
        {"t", "1"}, {"f", "g"}, {"g", "2*f^3 + t*f + gamma"}, {"alpha", "0"}, {"beta", "0"}, {"gamma", "0"}};
    c.require(field.size() == want.size(), "six components");
    long worst = -1000;
    for (std::size_t i = 0; i < want.size() && i < field.size(); ++i) {
        c.require(field[i][0] == want[i].first, "component order");
        const auto r =
            exprs_probably_equal(parse_expr(field[i][1].get<std::string>()), parse_expr(want[i].second), 40, 1000 + i);
        c.require(r.zero && r.modulus > (std::uint64_t{1} << 30), "component " + want[i].first);
        c.require(r.failure_bound_log10() < -9, "bound for " + want[i].first);
        worst = std::max(worst, r.failure_bound_log10());
        c.notes << " " << want[i].first << "=" << field[i][1].get<std::string>() << ";";
    }
    c.require(out.report["remainder_second_order"].get<bool>(), "remainder");
    c.notes << " bound<=1e" << worst;
}

void area_preservation(Check &c)
{
    const auto r = cases::fiber_jacobian_det_is_one(cases::dp2_system(), 40, 2);
    c.require(r.zero && r.failure_bound_log10() < -9, "dP2 det = 1");
    const auto doubling = parse_system(cli::read_file(systems("doubling.sys")));
    const auto swap = parse_system(cli::read_file(systems("swap.sys")));
    c.require(!cases::fiber_jacobian_det_is_one(doubling, 40, 3).zero, "det 2 rejected");
    c.require(!cases::fiber_jacobian_det_is_one(swap, 40, 4).zero, "det -1 rejected");
    c.notes << " dP2 bound<=1e" << r.failure_bound_log10();
}

void groupoid_dimension(Check &c)
{
    for (unsigned k = 1; k <= 6; ++k) {
        c.require(cases::symplectic_jet_dim(k, 500 + k) == cases::symplectic_jet_dim_closed_form(k),
                  "symplectic rank k=" + std::to_string(k));
    }
    c.require(cases::symplectic_jet_dim(1, 77) == 5, "symplectic k=1 is 5");
    for (unsigned k = 1; k <= 2; ++k) {
        cli::Options opt;
        opt.path = systems("dp2.sys");
        opt.pins = {"a,b,c"};
        opt.seed = 2026 + k;
        opt.order = k;
        opt.degree = 3;
        opt.iters = 200;
        const auto rep = cli::cmd_dimension(opt).report;
        const std::size_t want = 4 + cases::symplectic_jet_dim(k, 900 + k);
        c.require(rep["estimate"].get<std::size_t>() == want, "estimate k=" + std::to_string(k));
        c.require(rep["confidence"] == "HIGH", "confidence k=" + std::to_string(k));
        c.require(rep["saturated"].get<bool>(), "saturation k=" + std::to_string(k));
        c.notes << " k=" << k << ": " << rep["estimate"] << " (want " << want << ", points " << rep["points"]
                << ");";
    }
}

void specialisation(Check &c)
{
    cli::Options opt;
    opt.path = systems("scaling.sys");
    opt.param = "s";
    opt.at = "1";
    opt.strict = true;
    const auto scaling = cli::cmd_specialise(opt);
    c.require(scaling.exit_code == 0, "scaling exit code");
    c.require(scaling.report["verdict"] == "PASS", "scaling strict drop");
    c.notes << " scaling special " << scaling.report["special"]["estimate"] << " < relative "
            << scaling.report["relative_generic"] << ";";

    std::mt19937_64 rng(31337);
    std::vector<std::size_t> specials;
    for (int run = 0; run < 2; ++run) {
        cli::Options d;
        d.path = systems("dp2.sys");
        d.param = "c";
        d.at = std::to_string(rng() % 1000000 + 1) + "/" + std::to_string(rng() % 997 + 1);
        d.pins = {"a,b"};
        d.seed = 4000 + run;
        d.order = 1;
        d.strict = true;
        const auto rep = cli::cmd_specialise(d);
        c.require(rep.exit_code == 0, "dP2 exit code");
        c.require(rep.report["verdict"] == "PASS-EQUALITY", "dP2 equality at c=" + d.at);
        specials.push_back(rep.report["special"]["estimate"].get<std::size_t>());
        c.notes << " dP2 c=" << d.at << ": " << rep.report["special"]["estimate"] << " = "
                << rep.report["relative_generic"] << ";";
    }
    c.require(specials.size() == 2 && specials[0] == specials[1], "equal estimates at both pins");
}

void property_suites(Check &c)
{
    const std::string prolong = std::string(JETGROUPOID_TEST_DIR) + "/test_prolong";
    const std::string jetcore = std::string(JETGROUPOID_TEST_DIR) + "/test_jetcore";
    const std::vector<std::string> runs{
        prolong + " --gtest_brief=1 "
                  "--gtest_filter=ProlongProperties.*:IterateJets.GroupoidComposition:TotalDerivative.Commute",
        jetcore + " --gtest_brief=1 --gtest_filter=SeriesProperties.TruncationCompatibility",
    };
    for (const auto &cmd : runs) {
        const int status = std::system((cmd + " > /dev/null").c_str());
        c.require(status == 0, cmd);
    }
    c.notes << " functoriality, gamma-equivariance, groupoid composition, D_iD_j commutation, truncation";
}

void calibration_probe(Check &c)
{
    using namespace calibration;
    const auto run = [&](const char *name, const OrbitSample &s, std::size_t want) {
        const auto est = estimate_dimension(s, 3);
        c.require(est.estimate == want, std::string(name) + " dimension");
        c.require(est.high_confidence, std::string(name) + " confidence");
        c.notes << " " << name << "=" << est.estimate << "/" << est.confidence() << ";";
    };
    run("line", line_sample(100), 1);
    run("parabola", parabola_sample(100), 1);
    run("plane", plane_sample(100), 2);
    run("cubic-graph", cubic_graph_sample(200), 2);
}

void invariant_restriction(Check &c)
{
    const auto fam = cases::dp2_confluence_family();
    const auto ctx = JetContext::of(fam.system, 1);
    const auto area = cases::area_invariant(ctx);
    const auto inv = check_family_invariance(area, fam.system, 1, 40, 71);
    c.require(inv.invariant && inv.failure_bound_log10() < -9, "family invariance of det");
    const auto limit = extract_vector_field(fam);
    const auto eps_index = static_cast<unsigned>(fam.system.params.size() - 1);
    const auto r = check_invariant_restricts(JetFraction<RationalField>(area), limit.field, ctx, 40, 72,
                                             std::pair<unsigned, mpq_class>{eps_index, 0});
    c.require(r.zero && r.failure_bound_log10() < -9, "RX(det) = 0");
    c.notes << " family bound<=1e" << inv.failure_bound_log10() << "; restriction bound<=1e"
            << r.failure_bound_log10();
}

} // namespace

int main()
{
    struct Criterion
    {
        const char *name;
        std::function<void(Check &)> run;
        double budget_s;
    };
    const std::vector<Criterion> criteria{
        {"1 confluence reproduction", confluence_reproduction, 10},
        {"2 area preservation", area_preservation, 1},
        {"3 groupoid dimension", groupoid_dimension, 600},
        {"4 specialisation inequality", specialisation, 600},
        {"5 algebraic property suites", property_suites, 120},
        {"6 hilbert probe calibration", calibration_probe, 60},
        {"7 invariant restriction", invariant_restriction, 600},
    };
    int failures = 0;
    for (const auto &cr : criteria) {
        Check c;
        const auto start = Clock::now();
        try {
            cr.run(c);
        } catch (const std::exception &e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double t = seconds_since(start);
        c.require(t < cr.budget_s, "runtime budget");
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << cr.name << " (" << std::fixed;
        std::cout.precision(2);
        std::cout << t << " s)" << c.notes.str() << std::endl;
        failures += c.ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
