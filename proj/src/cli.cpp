#include "algmatch/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "algmatch/io.hpp"
#include "algmatch/matroid.hpp"
#include "algmatch/oracles.hpp"

namespace algmatch {

namespace {

using Clock = std::chrono::steady_clock;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

MulOptions mul_options(const Flags& f) {
    MulOptions m;
    m.naive = f.naive_mul;
    return m;
}

SolverConfig solver_config(const Flags& f) {
    SolverConfig c;
    c.alpha = f.alpha;
    c.mul = mul_options(f);
    c.seed = f.seed;
    c.retries = f.retries;
    c.verify = f.verify;
    return c;
}

void emit(const RunReport& r, const Flags& flags, std::ostream& out) {
    if (flags.json) {
        out << to_json(r).dump() << '\n';
        return;
    }
    out << "command " << r.command << '\n';
    out << "size " << r.size << '\n';
    if (r.command == "intersect") {
        out << "elements";
        for (Index x : r.elements) out << ' ' << x;
        out << '\n';
    } else {
        out << "edges";
        for (const Edge& e : r.edges) out << ' ' << e.u << '-' << e.v;
        out << '\n';
    }
    out << "verified " << (r.verified ? "true" : "false") << '\n';
    out << "field_mul_count " << r.field_mul_count << '\n';
    if (!r.note.empty()) out << "note " << r.note << '\n';
}

// Shared error handling: parse and field problems map to exit 4, exhausted
// randomness to exit 5.
template <class Body>
Outcome guarded(RunReport base, const Flags& flags, std::ostream& out, Body body) {
    Outcome o{std::move(base), kExitOk};
    try {
        o = body(o.report);
    } catch (const ParseError& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const FieldMismatch& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const DimensionMismatch& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const InvalidInstance& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const RankDeficientMatroid& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const NotPrime& e) {
        o.report.note = e.what();
        o.exit_code = kExitInput;
    } catch (const RandomnessExhausted& e) {
        o.report.note = e.what();
        o.exit_code = kExitRandomness;
    }
    if (o.exit_code != kExitOk) o.report.verified = false;
    emit(o.report, flags, out);
    return o;
}

bool is_matching(const Graph& g, const EdgeList& m) {
    std::vector<bool> used(g.size(), false);
    for (const Edge& e : m) {
        if (e.u >= g.size() || e.v >= g.size() || !g.adjacent(e.u, e.v) || used[e.u] || used[e.v]) return false;
        used[e.u] = used[e.v] = true;
    }
    return true;
}

}  // namespace

nlohmann::json to_json(const RunReport& r) {
    nlohmann::json j;
    j["command"] = r.command;
    j["digest"] = r.digest;
    j["seed"] = r.seed;
    j["prime"] = r.prime;
    j["size"] = r.size;
    if (r.command == "intersect") {
        j["elements"] = r.elements;
    } else {
        nlohmann::json es = nlohmann::json::array();
        for (const Edge& e : r.edges) es.push_back({e.u, e.v});
        j["elements"] = es;
    }
    j["verified"] = r.verified;
    j["field_mul_count"] = r.field_mul_count;
    j["wall_time_ms"] = r.wall_time_ms;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

// ------------------------------------------------------------------ match

Outcome cmd_match(const std::string& graph_file, const Flags& flags, std::ostream& out) {
    RunReport base;
    base.command = "match";
    base.seed = flags.seed;
    base.prime = flags.prime;
    return guarded(std::move(base), flags, out, [&](RunReport r) {
        const Graph g = parse_graph(slurp(graph_file));
        const PrimeField f(flags.prime);
        r.digest = fnv1a(write_graph(g));
        const auto t0 = Clock::now();
        reset_mul_count();
        MatchingResult res = max_matching(g, solver_config(flags), f);
        r.field_mul_count = mul_count();
        r.wall_time_ms = ms_since(t0);
        r.edges = res.edges;
        r.size = res.edges.size();
        r.verified = is_matching(g, res.edges) && 2 * res.edges.size() == res.tutte_rank;
        Outcome o{std::move(r), kExitOk};
        if (!o.report.verified) {
            o.report.note = "matching failed verification";
            o.exit_code = kExitRandomness;
        } else if (flags.oracle) {
            if (g.size() > 24) {
                o.report.note = "oracle skipped: more than 24 vertices";
            } else if (oracle_max_matching(g) != o.report.size) {
                o.report.note = "oracle size differs";
                o.report.verified = false;
                o.exit_code = kExitOracleMismatch;
            }
        }
        return o;
    });
}

// -------------------------------------------------------------- intersect

Outcome cmd_intersect(const std::string& m1_file, const std::string& m2_file, const std::string& algorithm,
                      const Flags& flags, std::ostream& out) {
    RunReport base;
    base.command = "intersect";
    base.seed = flags.seed;
    base.prime = flags.prime;
    return guarded(std::move(base), flags, out, [&](RunReport r) {
        if (algorithm != "alg1" && algorithm != "alg2" && algorithm != "oracle")
            throw ParseError("unknown algorithm '" + algorithm + "'");
        const Matrix a1 = parse_matroid(slurp(m1_file));
        const Matrix a2 = parse_matroid(slurp(m2_file));
        if (!(a1.field() == a2.field())) throw FieldMismatch("the two matroid files use different primes");
        if (flags.prime_given && a1.field().modulus() != flags.prime)
            throw FieldMismatch("--prime differs from the prime in the files");
        const MatroidPair pair = MatroidPair::from_columns(a1, a2);
        r.prime = a1.field().modulus();
        r.digest = fnv1a(write_matroid(a1) + write_matroid(a2));
        IntersectConfig cfg;
        cfg.seed = flags.seed;
        cfg.retries = flags.retries;
        cfg.mul = mul_options(flags);
        const auto t0 = Clock::now();
        reset_mul_count();
        Index bound = 0;
        if (algorithm == "oracle") {
            r.elements = oracle_matroid_intersection(pair);
        } else {
            IntersectResult res = algorithm == "alg1" ? intersect_alg1(pair, cfg) : intersect_alg2(pair, cfg);
            r.elements = std::move(res.elements);
            bound = res.rank_y;
        }
        r.field_mul_count = mul_count();
        r.wall_time_ms = ms_since(t0);
        r.size = r.elements.size();
        r.verified = common_independent(pair, r.elements) && (algorithm == "oracle" || r.size == bound);
        Outcome o{std::move(r), kExitOk};
        if (!o.report.verified) {
            o.report.note = "intersection failed verification";
            o.exit_code = kExitRandomness;
        } else if (flags.oracle && algorithm != "oracle") {
            if (pair.ground() > 200) {
                o.report.note = "oracle skipped: more than 200 elements";
            } else if (oracle_matroid_intersection(pair).size() != o.report.size) {
                o.report.note = "oracle size differs";
                o.report.verified = false;
                o.exit_code = kExitOracleMismatch;
            }
        }
        return o;
    });
}

// -------------------------------------------------------------------- bpm

Outcome cmd_bpm(const std::string& instance_file, bool exists_only, const Flags& flags, std::ostream& out) {
    RunReport base;
    base.command = "bpm";
    base.seed = flags.seed;
    base.prime = flags.prime;
    return guarded(std::move(base), flags, out, [&](RunReport r) {
        const PathMatchingInstance inst = parse_bpm(slurp(instance_file));
        if (flags.prime_given && inst.field().modulus() != flags.prime)
            throw FieldMismatch("--prime differs from the prime in the file");
        r.prime = inst.field().modulus();
        r.digest = fnv1a(write_bpm(inst));
        const auto t0 = Clock::now();
        reset_mul_count();
        bool exists = false;
        if (exists_only) {
            // A nonsingular substitution certifies existence.
            exists = bpm_exists(inst, flags.seed);
            r.verified = exists;
            r.note = exists ? "exists" : "no bpm";
        } else {
            BpmResult res = solve_bpm(inst, solver_config(flags));
            exists = res.edges.has_value();
            if (exists) r.edges = *res.edges;
            r.verified = exists && validate_bpm(inst, r.edges);
            if (!exists) r.note = "no bpm";
        }
        r.field_mul_count = mul_count();
        r.wall_time_ms = ms_since(t0);
        r.size = r.edges.size();
        Outcome o{std::move(r), kExitOk};
        if (!exists) {
            o.exit_code = kExitNoSolution;
        } else if (!o.report.verified) {
            o.report.note = "bpm failed verification";
            o.exit_code = kExitRandomness;
        }
        if (flags.oracle && o.exit_code != kExitRandomness) {
            if (inst.s > 8 || inst.t1 > 3 || inst.t2 > 3) {
                o.report.note += "; oracle skipped: instance too large";
            } else if (oracle_bpm_exists(inst) != exists) {
                o.report.note = "oracle existence differs";
                o.report.verified = false;
                o.exit_code = kExitOracleMismatch;
            }
        }
        return o;
    });
}

// ------------------------------------------------------------------ bench

int cmd_bench(const std::string& family, const std::vector<Index>& sizes, Index r, const Flags& flags,
              std::ostream& out) {
    if (family != "alg1" && family != "alg2" && family != "matching") {
        out << "unknown family '" << family << "'\n";
        return kExitInput;
    }
    const PrimeField f(flags.prime);
    out << "n,r,algorithm,field_mul_count,wall_time_ms\n";
    for (Index n : sizes) {
        Rng rng = attempt_rng(flags.seed, n);
        std::uint64_t muls = 0;
        double ms = 0;
        if (family == "matching") {
            std::bernoulli_distribution coin(0.5);
            Graph g(n);
            for (Index a = 0; a < n; ++a)
                for (Index b = a + 1; b < n; ++b)
                    if (coin(rng)) g.add_edge(a, b);
            const auto t0 = Clock::now();
            reset_mul_count();
            max_matching(g, solver_config(flags), f);
            muls = mul_count();
            ms = ms_since(t0);
        } else {
            const MatroidPair pair{Matrix::random(f, r, n, rng), Matrix::random(f, n, r, rng)};
            IntersectConfig cfg;
            cfg.seed = flags.seed;
            cfg.retries = flags.retries;
            cfg.mul = mul_options(flags);
            const auto t0 = Clock::now();
            reset_mul_count();
            if (family == "alg1")
                intersect_alg1(pair, cfg);
            else
                intersect_alg2(pair, cfg);
            muls = mul_count();
            ms = ms_since(t0);
        }
        out << n << ',' << (family == "matching" ? 0 : r) << ',' << family << ',' << muls << ',' << ms << '\n';
    }
    return kExitOk;
}

}  // namespace algmatch
