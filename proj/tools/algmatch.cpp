// Command-line driver: match, intersect, bpm, bench.

#include <iostream>

#include <CLI11.hpp>

#include "algmatch/cli.hpp"

using namespace algmatch;

int main(int argc, char** argv) {
    CLI::App app{"Randomized algebraic matching, path-matching and matroid intersection"};
    app.require_subcommand(1);

    Flags flags;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", flags.seed, "random seed")->capture_default_str();
        sub->add_option_function<std::uint64_t>(
               "--prime",
               [&](const std::uint64_t& p) {
                   flags.prime = p;
                   flags.prime_given = true;
               },
               "field prime (graphs; must match the files otherwise)")
            ->default_str(std::to_string(PrimeField::kDefaultPrime));
        sub->add_option("--alpha", flags.alpha, "parts per recursion level")->capture_default_str();
        sub->add_flag("--naive-mul", flags.naive_mul, "classical multiplication only");
        sub->add_flag("--verify,!--no-verify", flags.verify, "verify inside the solver (default on)");
        sub->add_flag("--json", flags.json, "JSON report");
        sub->add_flag("--oracle", flags.oracle, "cross-check with the exact oracle");
        sub->add_option("--retries", flags.retries, "re-randomizations after a failed check")->capture_default_str();
    };

    std::string graph_file;
    auto* match = app.add_subcommand("match", "maximum matching of a graph file");
    match->add_option("graph", graph_file)->required();
    common(match);

    std::string m1, m2, algorithm = "alg2";
    auto* intersect = app.add_subcommand("intersect", "linear matroid intersection");
    intersect->add_option("m1", m1)->required();
    intersect->add_option("m2", m2)->required();
    intersect->add_option("--algorithm", algorithm)
        ->check(CLI::IsMember({"alg1", "alg2", "oracle"}))
        ->capture_default_str();
    common(intersect);

    std::string instance_file;
    bool exists_only = false;
    auto* bpm = app.add_subcommand("bpm", "basic path-matching");
    bpm->add_option("instance", instance_file)->required();
    bpm->add_flag("--exists-only", exists_only, "only decide existence");
    common(bpm);

    std::string family;
    std::vector<Index> sizes;
    Index rank = 16;
    auto* bench = app.add_subcommand("bench", "multiplication counts as CSV");
    bench->add_option("family", family)->required()->check(CLI::IsMember({"alg1", "alg2", "matching"}));
    bench->add_option("sizes", sizes, "values of n");
    bench->add_option("-r,--rank", rank, "matroid rank")->capture_default_str();
    common(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*match) return cmd_match(graph_file, flags, std::cout).exit_code;
        if (*intersect) return cmd_intersect(m1, m2, algorithm, flags, std::cout).exit_code;
        if (*bpm) return cmd_bpm(instance_file, exists_only, flags, std::cout).exit_code;
        if (*bench) return cmd_bench(family, sizes, rank, flags, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
