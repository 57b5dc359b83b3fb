#include "gfqc/code.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gfqc/rng.hpp"

namespace gfqc {

std::size_t SparseCode::edge_count() const {
    std::size_t e = 0;
    for (const auto& c : checks) e += c.size();
    return e;
}

std::vector<int> SparseCode::variable_degrees() const {
    std::vector<int> deg(n_sym, 0);
    for (const auto& c : checks)
        for (const auto& e : c) ++deg[e.var];
    return deg;
}

std::vector<std::pair<int, std::uint32_t>> SparseCode::check_degree_histogram() const {
    std::map<int, std::uint32_t> h;
    for (const auto& c : checks) ++h[static_cast<int>(c.size())];
    return {h.begin(), h.end()};
}

DegreeProfile SparseCode::degree_profile() const {
    DegreeProfile prof;
    const double edges = static_cast<double>(edge_count());
    std::map<int, std::uint32_t> vh;
    for (int d : variable_degrees()) ++vh[d];
    for (auto [d, cnt] : vh)
        if (d > 0) prof.lambda.emplace_back(d, d * static_cast<double>(cnt) / edges);
    for (auto [d, cnt] : check_degree_histogram())
        prof.rho.emplace_back(d, d * static_cast<double>(cnt) / edges);
    return prof;
}

namespace {

// BFS from variable v over the current (partial) graph; returns per-check
// depth in variable hops, -1 for unreached.
void bfs_check_depths(std::uint32_t v, const std::vector<std::array<std::int64_t, 2>>& var_checks,
                      const std::vector<int>& var_deg,
                      const std::vector<std::vector<std::uint32_t>>& check_vars,
                      std::vector<int>& depth, std::vector<int>& var_mark,
                      std::vector<std::uint32_t>& frontier, std::vector<std::uint32_t>& next,
                      int mark) {
    std::fill(depth.begin(), depth.end(), -1);
    frontier.clear();
    frontier.push_back(v);
    var_mark[v] = mark;
    int level = 0;
    while (!frontier.empty()) {
        next.clear();
        for (std::uint32_t u : frontier) {
            for (int k = 0; k < var_deg[u]; ++k) {
                const auto f = static_cast<std::uint32_t>(var_checks[u][static_cast<std::size_t>(k)]);
                if (depth[f] != -1) continue;
                depth[f] = level;
                for (std::uint32_t w : check_vars[f]) {
                    if (var_mark[w] != mark) {
                        var_mark[w] = mark;
                        next.push_back(w);
                    }
                }
            }
        }
        frontier.swap(next);
        ++level;
    }
}

}  // namespace

namespace {

// Throws PegStuck when the only checks with spare capacity already touch the
// variable; the caller retries with a fresh tie-breaking stream.
struct PegStuck {};

SparseCode build_peg_code_attempt(std::uint32_t n_sym, std::uint32_t m_sym, int p,
                                  std::uint64_t seed, std::uint64_t tie_seed) {
    const FieldTables tables = build_field_tables(p);
    const int q = tables.q;

    // capacities: the two degrees bracketing 2n/m with exact edge count 2n
    const std::uint64_t edges = 2ull * n_sym;
    const int d_lo = static_cast<int>(edges / m_sym);
    const std::uint32_t n_hi = static_cast<std::uint32_t>(edges - static_cast<std::uint64_t>(d_lo) * m_sym);
    std::vector<int> capacity(m_sym, d_lo);
    for (std::uint32_t j = 0; j < n_hi; ++j) ++capacity[j];

    Rng rng(tie_seed);
    std::vector<std::array<std::int64_t, 2>> var_checks(n_sym, {-1, -1});
    std::vector<int> var_deg(n_sym, 0);
    std::vector<std::vector<std::uint32_t>> check_vars(m_sym);
    std::vector<std::vector<Symbol>> check_coefs(m_sym);
    std::vector<int> check_deg(m_sym, 0);

    std::vector<int> depth(m_sym);
    std::vector<int> var_mark(n_sym, -1);
    std::vector<std::uint32_t> frontier, next, candidates;
    candidates.reserve(m_sym);

    for (std::uint32_t v = 0; v < n_sym; ++v) {
        for (int k = 0; k < 2; ++k) {
            if (k == 0) {
                std::fill(depth.begin(), depth.end(), -1);
            } else {
                bfs_check_depths(v, var_checks, var_deg, check_vars, depth, var_mark, frontier,
                                 next, static_cast<int>(v));
            }
            // unreached checks first, then maximal depth, then minimal degree
            int best_depth = -2;
            int best_deg = 0;
            candidates.clear();
            for (std::uint32_t f = 0; f < m_sym; ++f) {
                if (check_deg[f] >= capacity[f]) continue;
                if (k == 1 && (var_checks[v][0] == f)) continue;
                const int key = depth[f] == -1 ? std::numeric_limits<int>::max() : depth[f];
                if (key > best_depth || (key == best_depth && check_deg[f] < best_deg)) {
                    best_depth = key;
                    best_deg = check_deg[f];
                    candidates.clear();
                    candidates.push_back(f);
                } else if (key == best_depth && check_deg[f] == best_deg) {
                    candidates.push_back(f);
                }
            }
            if (candidates.empty()) throw PegStuck{};
            const std::uint32_t f = candidates[rng.below(candidates.size())];
            const auto coef = static_cast<Symbol>(1 + rng.below(static_cast<std::uint64_t>(q - 1)));
            var_checks[v][static_cast<std::size_t>(k)] = f;
            ++var_deg[v];
            check_vars[f].push_back(v);
            check_coefs[f].push_back(coef);
            ++check_deg[f];
        }
    }

    SparseCode code;
    code.p = p;
    code.n_sym = n_sym;
    code.m_sym = m_sym;
    code.b = 0;
    code.seed = seed;
    code.checks.resize(m_sym);
    for (std::uint32_t f = 0; f < m_sym; ++f) {
        auto& row = code.checks[f];
        for (std::size_t i = 0; i < check_vars[f].size(); ++i)
            row.push_back({check_vars[f][i], check_coefs[f][i]});
        std::sort(row.begin(), row.end(),
                  [](const CodeEdge& a, const CodeEdge& b) { return a.var < b.var; });
    }
    return code;
}

}  // namespace

SparseCode build_peg_code_m(std::uint32_t n_sym, std::uint32_t m_sym, int p, std::uint64_t seed) {
    if (n_sym == 0) throw std::invalid_argument("code needs at least one variable");
    if (m_sym < 2) throw std::invalid_argument("code needs at least two checks");
    if (m_sym > n_sym) throw std::invalid_argument("infeasible profile: more checks than variables");
    // greedy placement can corner itself (the remaining capacity all on one
    // already-adjacent check); rerolling the tie-break stream resolves it
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        try {
            return build_peg_code_attempt(n_sym, m_sym, p, seed,
                                          attempt == 0 ? seed : derive_seed(seed, 0xbeef + attempt));
        } catch (const PegStuck&) {
        }
    }
    throw std::invalid_argument("PEG construction infeasible for this profile");
}

SparseCode build_peg_code(std::uint32_t n_sym, double rate_target, int p, std::uint64_t seed) {
    if (!(rate_target > 0.0 && rate_target < 1.0))
        throw std::invalid_argument("rate must be in (0,1)");
    const auto m = static_cast<std::uint32_t>(
        std::llround(static_cast<double>(n_sym) * (1.0 - rate_target)));
    return build_peg_code_m(n_sym, m, p, seed);
}

SparseCode b_reduce(const SparseCode& code, int b, std::uint64_t seed) {
    if (b < 0 || static_cast<std::uint32_t>(b) >= code.m_sym)
        throw std::invalid_argument("reduction count must satisfy 0 <= b < m_sym");
    SparseCode out = code;
    if (b == 0) return out;

    Rng rng(seed);
    std::vector<std::uint32_t> ids(code.m_sym);
    for (std::uint32_t j = 0; j < code.m_sym; ++j) ids[j] = j;
    // partial Fisher-Yates: first b entries are the removed checks
    for (int k = 0; k < b; ++k) {
        const auto j = static_cast<std::size_t>(k) +
                       static_cast<std::size_t>(rng.below(ids.size() - static_cast<std::size_t>(k)));
        std::swap(ids[static_cast<std::size_t>(k)], ids[j]);
    }
    std::vector<bool> removed(code.m_sym, false);
    for (int k = 0; k < b; ++k) removed[ids[static_cast<std::size_t>(k)]] = true;

    out.checks.clear();
    out.checks.reserve(code.m_sym - static_cast<std::uint32_t>(b));
    for (std::uint32_t j = 0; j < code.m_sym; ++j)
        if (!removed[j]) out.checks.push_back(code.checks[j]);
    out.m_sym = static_cast<std::uint32_t>(out.checks.size());
    out.b = static_cast<std::uint16_t>(code.b + b);
    return out;
}

SparseCode make_code(int p, std::uint32_t n_sym, std::uint32_t m_before_reduction, int b,
                     std::uint64_t seed) {
    SparseCode code = build_peg_code_m(n_sym, m_before_reduction, p, derive_seed(seed, 0));
    code.seed = seed;
    if (b > 0) code = b_reduce(code, b, derive_seed(seed, 1));
    return code;
}

bool codeword_satisfies(const SparseCode& code, const FieldTables& tables,
                        std::span<const Symbol> word) {
    return unsatisfied_checks(code, tables, word) == 0;
}

int unsatisfied_checks(const SparseCode& code, const FieldTables& tables,
                       std::span<const Symbol> word) {
    int bad = 0;
    for (const auto& c : code.checks) {
        Symbol acc = 0;
        for (const auto& e : c) acc = FieldTables::add(acc, tables.mul(e.coef, word[e.var]));
        if (acc != 0) ++bad;
    }
    return bad;
}

bool has_four_cycle(const SparseCode& code) {
    std::vector<std::vector<std::uint32_t>> var_checks(code.n_sym);
    for (std::uint32_t f = 0; f < code.m_sym; ++f)
        for (const auto& e : code.checks[f]) var_checks[e.var].push_back(f);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& fs : var_checks) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
            for (std::size_t j = i + 1; j < fs.size(); ++j) {
                auto key = std::minmax(fs[i], fs[j]);
                if (fs[i] == fs[j]) return true;  // parallel edge
                if (!seen.insert({key.first, key.second}).second) return true;
            }
        }
    }
    return false;
}

void write_code_file(const SparseCode& code, std::ostream& os) {
    char poly_hex[8];
    std::snprintf(poly_hex, sizeof poly_hex, "%x", primitive_polynomial(code.p));
    os << "gfq-code v1 p=" << code.p << " n=" << code.n_sym << " m=" << code.m_sym
       << " b=" << code.b << " seed=" << code.seed << " poly=0x" << poly_hex << "\n";
    char buf[16];
    for (std::uint32_t f = 0; f < code.m_sym; ++f) {
        os << "check " << f << ":";
        for (const auto& e : code.checks[f]) {
            std::snprintf(buf, sizeof buf, " %u:%x", e.var, static_cast<unsigned>(e.coef));
            os << buf;
        }
        os << "\n";
    }
}

void write_code_file(const SparseCode& code, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open code file for writing: " + path);
    write_code_file(code, os);
}

SparseCode read_code_file(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty code file");
    SparseCode code;
    {
        std::istringstream hs(line);
        std::string tag, ver;
        hs >> tag >> ver;
        if (tag != "gfq-code" || ver != "v1")
            throw std::runtime_error("bad code file header: " + line);
        std::string kv;
        unsigned poly = 0;
        bool have_poly = false;
        while (hs >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bad header field: " + kv);
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "p") code.p = std::stoi(val);
            else if (key == "n") code.n_sym = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "m") code.m_sym = static_cast<std::uint32_t>(std::stoul(val));
            else if (key == "b") code.b = static_cast<std::uint16_t>(std::stoul(val));
            else if (key == "seed") code.seed = std::stoull(val);
            else if (key == "poly") { poly = static_cast<unsigned>(std::stoul(val, nullptr, 16)); have_poly = true; }
            else throw std::runtime_error("unknown header field: " + key);
        }
        if (have_poly && poly != primitive_polynomial(code.p))
            throw std::runtime_error("code file polynomial does not match the fixed table");
    }
    code.checks.resize(code.m_sym);
    const int q = 1 << code.p;
    std::uint32_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag != "check") throw std::runtime_error("bad code file line: " + line);
        std::string id_str;
        ls >> id_str;
        if (id_str.empty() || id_str.back() != ':')
            throw std::runtime_error("bad check id: " + line);
        const auto id = static_cast<std::uint32_t>(std::stoul(id_str.substr(0, id_str.size() - 1)));
        if (id >= code.m_sym) throw std::runtime_error("check id out of range: " + id_str);
        std::string entry;
        while (ls >> entry) {
            const auto colon = entry.find(':');
            if (colon == std::string::npos) throw std::runtime_error("bad edge entry: " + entry);
            const auto var = static_cast<std::uint32_t>(std::stoul(entry.substr(0, colon)));
            const auto coef = static_cast<Symbol>(std::stoul(entry.substr(colon + 1), nullptr, 16));
            if (var >= code.n_sym) throw std::runtime_error("variable id out of range: " + entry);
            if (coef == 0 || coef >= static_cast<Symbol>(q))
                throw std::runtime_error("coefficient out of range: " + entry);
            code.checks[id].push_back({var, coef});
        }
        ++rows;
    }
    if (rows != code.m_sym) throw std::runtime_error("code file is missing check rows");
    return code;
}

SparseCode read_code_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open code file: " + path);
    return read_code_file(is);
}

}  // namespace gfqc
