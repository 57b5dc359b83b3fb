#ifndef GFQC_PEELING_HPP
#define GFQC_PEELING_HPP

#include <cstdint>
#include <vector>

#include "gfqc/code.hpp"

namespace gfqc {

/// One leaf-removal step: pivot is the leaf that triggered removal of the
/// check; freed holds the other degree-one variables that came off with it.
struct PeelStep {
    std::uint32_t check = 0;
    std::uint32_t pivot = 0;
    std::vector<std::uint32_t> freed;
};

/// Elimination order produced by leaf removal. Replaying steps in reverse
/// solves each pivot by back substitution once the information symbols are
/// fixed, so this doubles as the decoder's schedule. The replay_* arrays
/// hold that schedule flattened in reverse-peel order and relabeled by
/// first use (local_of_var maps original ids to the dense replay labels),
/// so the decoder's accesses trend sequential instead of chasing per-check
/// adjacency lists across the heap.
struct PeelOrder {
    std::vector<PeelStep> steps;
    std::vector<std::uint32_t> info_set;       ///< ascending variable ids
    std::vector<std::uint32_t> payload_order;  ///< freed sets in step order, isolated vars last
    std::vector<std::uint32_t> core_checks;    ///< residual check ids

    std::vector<std::uint32_t> local_of_var;   ///< original id -> replay label
    std::vector<std::uint32_t> replay_pivot;   ///< per replay step, replay labels
    std::vector<Symbol> replay_pivot_coef;     ///< pivot's coefficient on its check
    std::vector<std::uint32_t> replay_offset;  ///< replay steps + 1
    std::vector<std::uint32_t> replay_var;     ///< flattened non-pivot neighbors, replay labels
    std::vector<Symbol> replay_coef;

    std::uint32_t core_size() const { return static_cast<std::uint32_t>(core_checks.size()); }
    bool core_empty() const { return core_checks.empty(); }
};

/// Peels leaves until none remain. The residual core does not depend on the
/// removal order; order_seed != 0 randomizes it (used to assert exactly
/// that). order_seed == 0 is the canonical order shared by encoder and
/// decoder. Variables isolated by check removal count as information
/// symbols: nothing constrains them.
PeelOrder leaf_removal(const SparseCode& code, std::uint64_t order_seed = 0);

}  // namespace gfqc

#endif
