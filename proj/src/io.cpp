#include "algmatch/io.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <sstream>
#include <vector>

namespace algmatch {

namespace {

// Tokenized non-blank lines with their line numbers.
class Lines {
public:
    explicit Lines(std::istream& in) {
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            std::istringstream ss(line);
            std::vector<std::string> toks;
            for (std::string t; ss >> t;) toks.push_back(std::move(t));
            if (!toks.empty()) lines_.push_back({no, std::move(toks)});
        }
    }

    bool done() const { return pos_ == lines_.size(); }
    const std::vector<std::string>& peek() const { return lines_[pos_].toks; }
    std::size_t line_no() const { return done() ? (lines_.empty() ? 0 : lines_.back().no) : lines_[pos_].no; }
    const std::vector<std::string>& next() {
        if (done()) fail("unexpected end of file");
        return lines_[pos_++].toks;
    }
    std::size_t last_no() const { return lines_[pos_ - 1].no; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("line " + std::to_string(line_no()) + ": " + what);
    }
    [[noreturn]] void fail_last(const std::string& what) const {
        throw ParseError("line " + std::to_string(last_no()) + ": " + what);
    }

private:
    struct Line {
        std::size_t no;
        std::vector<std::string> toks;
    };
    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

std::optional<std::uint64_t> to_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::uint64_t number(const Lines& ls, const std::string& s) {
    auto v = to_u64(s);
    if (!v) ls.fail_last("expected a non-negative integer, got '" + s + "'");
    return *v;
}

void expect_arity(const Lines& ls, const std::vector<std::string>& t, std::size_t k) {
    if (t.size() != k) ls.fail_last("expected " + std::to_string(k) + " fields after '" + t[0] + "'");
}

PrimeField file_field(const Lines& ls, const std::string& s) {
    const std::uint64_t p = number(ls, s);
    if (p < kMinFilePrime) ls.fail_last("prime must be at least 65536");
    try {
        return PrimeField(p);
    } catch (const Error& e) {
        ls.fail_last(e.what());
    }
}

Matrix read_rows(Lines& ls, const PrimeField& f, Index rows, Index cols) {
    Matrix m(f, rows, cols);
    if (cols == 0) return m;  // empty rows have no lines
    for (Index i = 0; i < rows; ++i) {
        const auto& t = ls.next();
        if (t.size() != cols) ls.fail_last("expected " + std::to_string(cols) + " entries in matrix row");
        for (Index j = 0; j < cols; ++j) {
            const std::uint64_t x = number(ls, t[j]);
            if (x >= f.modulus()) ls.fail_last("entry '" + t[j] + "' is not reduced mod p");
            m(i, j) = Scalar{x};
        }
    }
    return m;
}

void write_rows(std::ostringstream& out, const Matrix& m) {
    if (m.cols() == 0) return;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j).v;
        out << '\n';
    }
}

}  // namespace

// ---------------------------------------------------------------- graph

Graph parse_graph(std::istream& in) {
    Lines ls(in);
    const auto& h = ls.next();
    if (h[0] != "graph") ls.fail_last("expected 'graph <n>'");
    expect_arity(ls, h, 2);
    const std::uint64_t n = number(ls, h[1]);
    if (n > (1u << 16)) ls.fail_last("graph too large");
    Graph g(n);
    while (!ls.done()) {
        const auto& t = ls.next();
        if (t[0] != "e") ls.fail_last("expected 'e <u> <v>'");
        expect_arity(ls, t, 3);
        const std::uint64_t u = number(ls, t[1]), v = number(ls, t[2]);
        if (u >= n || v >= n) ls.fail_last("vertex out of range");
        g.add_edge(u, v);
    }
    return g;
}

Graph parse_graph(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_graph(in);
}

std::string write_graph(const Graph& g) {
    std::ostringstream out;
    out << "graph " << g.size() << '\n';
    for (const Edge& e : g.edges()) out << "e " << e.u << ' ' << e.v << '\n';
    return out.str();
}

// -------------------------------------------------------------- matroid

Matrix parse_matroid(std::istream& in) {
    Lines ls(in);
    const auto& h = ls.next();
    if (h[0] != "matroid") ls.fail_last("expected 'matroid <r> <n> <p>'");
    expect_arity(ls, h, 4);
    const std::uint64_t r = number(ls, h[1]), n = number(ls, h[2]);
    const PrimeField f = file_field(ls, h[3]);
    Matrix m = read_rows(ls, f, r, n);
    if (!ls.done()) ls.fail("trailing content after the matrix");
    return m;
}

Matrix parse_matroid(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_matroid(in);
}

std::string write_matroid(const Matrix& m) {
    std::ostringstream out;
    out << "matroid " << m.rows() << ' ' << m.cols() << ' ' << m.field().modulus() << '\n';
    write_rows(out, m);
    return out.str();
}

// ------------------------------------------------------------------ bpm

std::string vertex_name(const PathMatchingInstance& inst, Index v) {
    switch (inst.side(v)) {
        case Side::T1: return "a" + std::to_string(v);
        case Side::T2: return "b" + std::to_string(v - inst.t1);
        case Side::S: break;
    }
    return "s" + std::to_string(v - inst.t1 - inst.t2);
}

PathMatchingInstance parse_bpm(std::istream& in) {
    Lines ls(in);
    const auto& h = ls.next();
    if (h[0] != "bpm") ls.fail_last("expected 'bpm <t1> <t2> <s> <p>'");
    expect_arity(ls, h, 5);
    const std::uint64_t t1 = number(ls, h[1]), t2 = number(ls, h[2]), s = number(ls, h[3]);
    const PrimeField f = file_field(ls, h[4]);
    if (t1 + t2 + s > (1u << 16)) ls.fail_last("instance too large");

    std::optional<Matrix> q1, q2;
    std::vector<std::pair<Index, Index>> edges;
    auto vertex = [&](const std::string& name) -> Index {
        if (name.size() < 2) ls.fail_last("bad vertex name '" + name + "'");
        const auto k = to_u64(name.substr(1));
        if (!k) ls.fail_last("bad vertex name '" + name + "'");
        if (name[0] == 'a' && *k < t1) return *k;
        if (name[0] == 'b' && *k < t2) return t1 + *k;
        if (name[0] == 's' && *k < s) return t1 + t2 + *k;
        ls.fail_last("unknown vertex '" + name + "'");
    };
    while (!ls.done()) {
        const auto t = ls.next();
        if (t[0] == "Q1" || t[0] == "Q2") {
            expect_arity(ls, t, 3);
            const std::uint64_t rows = number(ls, t[1]), cols = number(ls, t[2]);
            auto& slot = t[0] == "Q1" ? q1 : q2;
            if (slot) ls.fail_last("repeated " + t[0] + " section");
            if (t[0] == "Q1" && cols != t1) ls.fail_last("Q1 must have t1 columns");
            if (t[0] == "Q2" && rows != t2) ls.fail_last("Q2 must have t2 rows");
            if (rows > (1u << 16) || cols > (1u << 16)) ls.fail_last("matrix too large");
            slot = read_rows(ls, f, rows, cols);
        } else if (t[0] == "e") {
            expect_arity(ls, t, 3);
            edges.emplace_back(vertex(t[1]), vertex(t[2]));
        } else {
            ls.fail_last("unknown directive '" + t[0] + "'");
        }
    }
    if (!q1) q1 = Matrix(f, 0, t1);
    if (!q2) q2 = Matrix(f, t2, 0);
    if (q1->rows() != q2->cols()) throw ParseError("Q1 rows and Q2 columns differ (the common rank r)");
    PathMatchingInstance inst(f, t1, t2, s, q1->rows());
    inst.q1 = std::move(*q1);
    inst.q2 = std::move(*q2);
    for (auto [a, b] : edges) {
        if (a == b) continue;
        const Side sa = inst.side(a), sb = inst.side(b);
        if (sa == sb && sa != Side::S) throw ParseError("edge " + vertex_name(inst, a) + " " + vertex_name(inst, b) +
                                                        " lies inside T1 or T2");
        inst.add_edge(a, b);
    }
    return inst;
}

PathMatchingInstance parse_bpm(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_bpm(in);
}

std::string write_bpm(const PathMatchingInstance& inst) {
    std::ostringstream out;
    out << "bpm " << inst.t1 << ' ' << inst.t2 << ' ' << inst.s << ' ' << inst.field().modulus() << '\n';
    out << "Q1 " << inst.q1.rows() << ' ' << inst.q1.cols() << '\n';
    write_rows(out, inst.q1);
    out << "Q2 " << inst.q2.rows() << ' ' << inst.q2.cols() << '\n';
    write_rows(out, inst.q2);
    for (const Edge& e : inst.edges) out << "e " << vertex_name(inst, e.u) << ' ' << vertex_name(inst, e.v) << '\n';
    return out.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace algmatch
