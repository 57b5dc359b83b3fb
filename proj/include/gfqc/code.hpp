#ifndef GFQC_CODE_HPP
#define GFQC_CODE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gfqc/field.hpp"

namespace gfqc {

struct CodeEdge {
    std::uint32_t var = 0;
    Symbol coef = 0;
    friend bool operator==(const CodeEdge&, const CodeEdge&) = default;
};

/// Degree profile as (degree, edge-fraction) pairs for variables (lambda)
/// and checks (rho).
struct DegreeProfile {
    std::vector<std::pair<int, double>> lambda;
    std::vector<std::pair<int, double>> rho;
};

/// Factor graph of a GF(2^p) code with nonzero edge labels. A word c is a
/// codeword when sum_i h_i*c_i = 0 at every check. The construction tuple
/// (p, n_sym, m_sym + b, b, seed) regenerates the graph exactly.
struct SparseCode {
    int p = 0;
    std::uint32_t n_sym = 0;
    std::uint32_t m_sym = 0;  ///< current check count (after any reduction)
    std::uint16_t b = 0;      ///< checks removed by reduction
    std::uint64_t seed = 0;
    std::vector<std::vector<CodeEdge>> checks;  ///< per check, ascending var

    std::size_t edge_count() const;
    std::vector<int> variable_degrees() const;
    std::vector<std::pair<int, std::uint32_t>> check_degree_histogram() const;
    DegreeProfile degree_profile() const;

    /// Rate of the unreduced base code, in information symbols per symbol.
    double nominal_rate() const {
        return 1.0 - static_cast<double>(m_sym + b) / n_sym;
    }
    /// Rate actually paid by the codec: info symbols per symbol (empty core).
    double rate() const { return static_cast<double>(n_sym - m_sym) / n_sym; }

    friend bool operator==(const SparseCode&, const SparseCode&) = default;
};

/// Progressive-edge-growth construction of an ultra-sparse code: every
/// variable has degree two, check degrees take the one or two integers
/// bracketing 2n/m with counts solving the edge-count equation exactly.
/// Each edge goes to a non-full check at maximal BFS distance from the
/// variable, minimal current degree first, remaining ties broken by the
/// seeded RNG. Coefficients are i.i.d. uniform over the nonzero symbols.
SparseCode build_peg_code(std::uint32_t n_sym, double rate_target, int p, std::uint64_t seed);

/// Same, with the check count given directly.
SparseCode build_peg_code_m(std::uint32_t n_sym, std::uint32_t m_sym, int p, std::uint64_t seed);

/// Removes b uniformly chosen checks (without replacement). The surviving
/// checks keep their relative order and are renumbered densely.
SparseCode b_reduce(const SparseCode& code, int b, std::uint64_t seed);

/// Canonical pipeline: PEG with derive_seed(seed,0), then reduction with
/// derive_seed(seed,1). This is the tuple stored in stream headers.
SparseCode make_code(int p, std::uint32_t n_sym, std::uint32_t m_before_reduction, int b,
                     std::uint64_t seed);

bool codeword_satisfies(const SparseCode& code, const FieldTables& tables,
                        std::span<const Symbol> word);
int unsatisfied_checks(const SparseCode& code, const FieldTables& tables,
                       std::span<const Symbol> word);

/// True when two variables share two checks (a 4-cycle in the factor graph).
bool has_four_cycle(const SparseCode& code);

/// Text code file, one check per line:
///   gfq-code v1 p=<p> n=<n> m=<m> b=<b> seed=<seed> poly=<hex>
///   check <id>: <var>:<coef_hex> ...
void write_code_file(const SparseCode& code, std::ostream& os);
void write_code_file(const SparseCode& code, const std::string& path);
SparseCode read_code_file(std::istream& is);
SparseCode read_code_file(const std::string& path);

}  // namespace gfqc

#endif
