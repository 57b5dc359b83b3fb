#ifndef GFQC_LINALG_HPP
#define GFQC_LINALG_HPP

#include <optional>
#include <vector>

#include "gfqc/code.hpp"

namespace gfqc {

struct SolveResult {
    bool feasible = false;
    std::vector<Symbol> word;  ///< a codeword extending the fixed assignment
};

/// Dense Gaussian elimination over GF(q). Returns a codeword consistent with
/// the fixed entries (free variables set to zero) or infeasible. O(n^3);
/// meant for tests and small-instance validation, not production decoding.
SolveResult gaussian_solve(const SparseCode& code, const FieldTables& tables,
                           const std::vector<std::optional<Symbol>>& fixed);

/// Rank of the parity-check matrix over GF(q), by the same elimination.
std::uint32_t parity_rank(const SparseCode& code, const FieldTables& tables);

}  // namespace gfqc

#endif
