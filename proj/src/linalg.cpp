#include "gfqc/linalg.hpp"

#include <stdexcept>

namespace gfqc {

namespace {

struct DenseSystem {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;                 // unknowns
    std::vector<Symbol> a;                  // rows x cols
    std::vector<Symbol> rhs;                // rows
    Symbol& at(std::uint32_t r, std::uint32_t c) { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Row-echelon elimination; returns false on an inconsistent row.
bool eliminate(DenseSystem& s, const FieldTables& t, std::uint32_t* rank_out,
               std::vector<std::int64_t>* pivot_of_col) {
    std::uint32_t rank = 0;
    if (pivot_of_col) pivot_of_col->assign(s.cols, -1);
    for (std::uint32_t c = 0; c < s.cols && rank < s.rows; ++c) {
        std::uint32_t pivot = rank;
        while (pivot < s.rows && s.at(pivot, c) == 0) ++pivot;
        if (pivot == s.rows) continue;
        if (pivot != rank) {
            for (std::uint32_t cc = c; cc < s.cols; ++cc) std::swap(s.at(pivot, cc), s.at(rank, cc));
            std::swap(s.rhs[pivot], s.rhs[rank]);
        }
        const Symbol inv_p = t.inv(s.at(rank, c));
        for (std::uint32_t cc = c; cc < s.cols; ++cc) s.at(rank, cc) = t.mul(inv_p, s.at(rank, cc));
        s.rhs[rank] = t.mul(inv_p, s.rhs[rank]);
        for (std::uint32_t r = 0; r < s.rows; ++r) {
            if (r == rank || s.at(r, c) == 0) continue;
            const Symbol factor = s.at(r, c);
            for (std::uint32_t cc = c; cc < s.cols; ++cc)
                s.at(r, cc) = FieldTables::add(s.at(r, cc), t.mul(factor, s.at(rank, cc)));
            s.rhs[r] = FieldTables::add(s.rhs[r], t.mul(factor, s.rhs[rank]));
        }
        if (pivot_of_col) (*pivot_of_col)[c] = rank;
        ++rank;
    }
    for (std::uint32_t r = rank; r < s.rows; ++r)
        if (s.rhs[r] != 0) return false;
    if (rank_out) *rank_out = rank;
    return true;
}

}  // namespace

SolveResult gaussian_solve(const SparseCode& code, const FieldTables& tables,
                           const std::vector<std::optional<Symbol>>& fixed) {
    if (fixed.size() != code.n_sym)
        throw std::invalid_argument("fixed assignment length must equal n_sym");

    std::vector<std::int64_t> col_of_var(code.n_sym, -1);
    std::vector<std::uint32_t> var_of_col;
    for (std::uint32_t v = 0; v < code.n_sym; ++v) {
        if (!fixed[v]) {
            col_of_var[v] = static_cast<std::int64_t>(var_of_col.size());
            var_of_col.push_back(v);
        }
    }

    DenseSystem s;
    s.rows = code.m_sym;
    s.cols = static_cast<std::uint32_t>(var_of_col.size());
    s.a.assign(static_cast<std::size_t>(s.rows) * s.cols, 0);
    s.rhs.assign(s.rows, 0);
    for (std::uint32_t f = 0; f < code.m_sym; ++f) {
        for (const auto& e : code.checks[f]) {
            if (fixed[e.var]) {
                s.rhs[f] = FieldTables::add(s.rhs[f], tables.mul(e.coef, *fixed[e.var]));
            } else {
                auto& cell = s.at(f, static_cast<std::uint32_t>(col_of_var[e.var]));
                cell = FieldTables::add(cell, e.coef);  // duplicate vars fold together
            }
        }
    }

    std::vector<std::int64_t> pivot_of_col;
    if (!eliminate(s, tables, nullptr, &pivot_of_col)) return {false, {}};

    SolveResult res;
    res.feasible = true;
    res.word.assign(code.n_sym, 0);
    for (std::uint32_t v = 0; v < code.n_sym; ++v)
        if (fixed[v]) res.word[v] = *fixed[v];
    // RREF with free columns pinned to zero: each pivot reads its rhs
    for (std::uint32_t c = 0; c < s.cols; ++c) {
        if (pivot_of_col[c] < 0) continue;
        res.word[var_of_col[c]] = s.rhs[static_cast<std::uint32_t>(pivot_of_col[c])];
    }
    return res;
}

std::uint32_t parity_rank(const SparseCode& code, const FieldTables& tables) {
    DenseSystem s;
    s.rows = code.m_sym;
    s.cols = code.n_sym;
    s.a.assign(static_cast<std::size_t>(s.rows) * s.cols, 0);
    s.rhs.assign(s.rows, 0);
    for (std::uint32_t f = 0; f < code.m_sym; ++f)
        for (const auto& e : code.checks[f]) {
            auto& cell = s.at(f, e.var);
            cell = FieldTables::add(cell, e.coef);
        }
    std::uint32_t rank = 0;
    eliminate(s, tables, &rank, nullptr);
    return rank;
}

}  // namespace gfqc
