#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "algmatch/linalg.hpp"
#include "algmatch/pathmatch.hpp"

namespace algmatch {

enum ExitCode : int {
    kExitOk = 0,
    kExitNoSolution = 2,  // no bpm: a valid answer, not a fault
    kExitOracleMismatch = 3,
    kExitInput = 4,  // parse errors and field mismatches
    kExitRandomness = 5,
};

struct Flags {
    std::uint64_t seed = 0;
    std::uint64_t prime = PrimeField::kDefaultPrime;
    bool prime_given = false;
    Index alpha = 4;
    bool naive_mul = false;
    bool verify = true;
    bool json = false;
    bool oracle = false;
    int retries = 3;
};

struct RunReport {
    std::string command;
    std::uint64_t digest = 0;  // FNV-1a of the canonical instance text
    std::uint64_t seed = 0;
    std::uint64_t prime = 0;
    std::size_t size = 0;
    IndexList elements;  // intersect
    EdgeList edges;      // match, bpm
    bool verified = false;
    std::uint64_t field_mul_count = 0;
    double wall_time_ms = 0;
    std::string note;  // set on failures and for --exists-only
};

nlohmann::json to_json(const RunReport& r);

struct Outcome {
    RunReport report;
    int exit_code = kExitOk;
};

/// Runs a command and writes its report (text or JSON) to `out`. Input
/// errors are reported as exit codes, not exceptions.
Outcome cmd_match(const std::string& graph_file, const Flags& flags, std::ostream& out);
Outcome cmd_intersect(const std::string& m1_file, const std::string& m2_file, const std::string& algorithm,
                      const Flags& flags, std::ostream& out);
Outcome cmd_bpm(const std::string& instance_file, bool exists_only, const Flags& flags, std::ostream& out);

/// CSV rows (n, r, algorithm, field_mul_count, wall_time_ms) for seeded
/// generated instances. Families: alg1, alg2, matching.
int cmd_bench(const std::string& family, const std::vector<Index>& sizes, Index r, const Flags& flags,
              std::ostream& out);

}  // namespace algmatch
