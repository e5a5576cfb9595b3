#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <jetgroupoid/cli.hpp>

namespace
{

using jetgroupoid::cli::Options;

void add_path(CLI::App *cmd, Options &opt)
{
    cmd->add_option("file", opt.path, "System file")->required();
}

void add_seed(CLI::App *cmd, Options &opt)
{
    cmd->add_option("--seed", opt.seed, "Master seed (default: $JETGROUPOID_SEED or 1)");
    cmd->add_option("--pin", opt.pins, "Pin parameters: name=value, or name for a seeded random value")
        ->allow_extra_args(false);
}

void add_probe(CLI::App *cmd, Options &opt, std::optional<std::size_t> &points)
{
    cmd->add_option("--order,-k", opt.order, "Jet order k")->capture_default_str();
    cmd->add_option("--degree,-d", opt.degree, "Maximal relation degree")->capture_default_str();
    cmd->add_option("--points", points, "Number of base points (default: saturation threshold)");
    cmd->add_option("--iters", opt.iters, "Iterates per base point")->capture_default_str();
    cmd->add_option("--jobs,-j", opt.jobs, "Worker threads (0: all cores); output does not depend on it");
    cmd->add_flag("--timings", opt.timings, "Add wall_time_ms to the report");
}

} // namespace

int main(int argc, char **argv)
{
    namespace cli = jetgroupoid::cli;
    Options opt;
    std::optional<std::size_t> points;
    std::string generator;
    std::string out_path;

    CLI::App app{"Jet prolongations, orbit-closure dimensions and confluence checks for fibered rational maps"};
    app.set_version_flag("--version", cli::version);
    app.require_subcommand(1);

    try {
        opt.seed = cli::default_seed();
    } catch (const jetgroupoid::Error &e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        return 2;
    }

    auto *check = app.add_subcommand("check", "Parse and validate a system");
    add_path(check, opt);
    check->add_option("--seed", opt.seed, "Seed for the Jacobian check");

    auto *prolong = app.add_subcommand("prolong", "Prolong one random frame");
    add_path(prolong, opt);
    add_seed(prolong, opt);
    prolong->add_option("--order,-k", opt.order, "Jet order k")->capture_default_str();

    auto *iterate = app.add_subcommand("iterate", "Taylor jet of an iterate at a random point");
    add_path(iterate, opt);
    add_seed(iterate, opt);
    iterate->add_option("--order,-k", opt.order, "Jet order k")->capture_default_str();
    iterate->add_option("--steps,-n", opt.steps, "Number of iterations")->capture_default_str();

    auto *dimension = app.add_subcommand("dimension", "Estimate the dimension of the orbit-jet closure");
    add_path(dimension, opt);
    add_seed(dimension, opt);
    add_probe(dimension, opt, points);
    dimension->add_flag("--strict", opt.strict, "Exit 1 unless the estimate is high confidence");

    auto *relations = app.add_subcommand("relations", "List polynomial relations on the orbit jets");
    add_path(relations, opt);
    add_seed(relations, opt);
    add_probe(relations, opt, points);

    auto *confluence = app.add_subcommand("confluence", "Extract the limit vector field of a family");
    add_path(confluence, opt);
    confluence->add_option("--pin", opt.pins, "Pin other parameters");
    confluence->add_option("--param", opt.param, "Family parameter")->required();
    confluence->add_option("--at", opt.at, "Special value")->capture_default_str();

    auto *specialise = app.add_subcommand("specialise", "Compare generic and special dimensions");
    add_path(specialise, opt);
    add_seed(specialise, opt);
    add_probe(specialise, opt, points);
    specialise->add_option("--param", opt.param, "Family parameter")->required();
    specialise->add_option("--at", opt.at, "Special value")->capture_default_str();
    specialise->add_flag("--strict", opt.strict, "Exit 1 unless both estimates are high confidence");

    auto *generate = app.add_subcommand("generate", "Write a generated system file");
    generate->add_option("name", generator, "dp2 or dp2-confluence")->required();
    generate->add_option("--out,-o", out_path, "Output file (default: stdout)");
    generate->add_option("--b-shift", opt.b_shift, "eps power in the b substitution")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    opt.points = points;

    try {
        cli::Outcome out;
        if (*check) {
            out = cli::cmd_check(opt);
        } else if (*prolong) {
            out = cli::cmd_prolong(opt);
        } else if (*iterate) {
            out = cli::cmd_iterate(opt);
        } else if (*dimension) {
            out = cli::cmd_dimension(opt);
        } else if (*relations) {
            out = cli::cmd_relations(opt);
        } else if (*confluence) {
            out = cli::cmd_confluence(opt);
        } else if (*specialise) {
            out = cli::cmd_specialise(opt);
        } else if (*generate) {
            out = cli::cmd_generate(generator, opt);
        }
        if (!out.text.empty()) {
            if (out_path.empty()) {
                std::cout << out.text;
            } else {
                std::ofstream f(out_path, std::ios::binary);
                if (!(f << out.text)) {
                    throw jetgroupoid::IoError("cannot write '" + out_path + "'");
                }
            }
        } else {
            std::cout << out.report.dump(2) << "\n";
        }
        return out.exit_code;
    } catch (const jetgroupoid::Error &e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
}
