#ifndef GFQC_MSGPASS_HPP
#define GFQC_MSGPASS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gfqc/code.hpp"
#include "gfqc/field.hpp"

namespace gfqc {

/// Per-variable prior over symbols: mu1_v(a) proportional to
/// exp(-L * bits_different(a, y_v)), normalized.
struct Prior {
    int q = 0;
    double strength = 0.0;      ///< L
    std::vector<double> table;  ///< n_sym * q

    std::span<const double> at(std::uint32_t v) const {
        return {table.data() + static_cast<std::size_t>(v) * q, static_cast<std::size_t>(q)};
    }
    std::span<double> at(std::uint32_t v) {
        return {table.data() + static_cast<std::size_t>(v) * q, static_cast<std::size_t>(q)};
    }
};

/// Reinforcement schedule and run limits. gamma(ell) = 1 - gamma0*gamma1^ell;
/// gamma1 = 1 keeps the reinforcement constant at 1 - gamma0.
struct RbpParams {
    double gamma0 = 0.92;
    double gamma1 = 1.0;
    int ell_max = 300;
    int t_max = 5;
    double epsilon = 1e-6;
    std::uint64_t schedule_seed = 0;
    bool divide_in_transform = false;  ///< product via division instead of prefix/suffix
};

/// Plain-BP run limits; damping applies to check-to-variable messages only
/// and does not move the fixed points.
struct BpParams {
    int ell_max = 300;
    double epsilon = 1e-6;
    double damping = 0.5;
    std::uint64_t schedule_seed = 0;
};

/// All q-vectors of one run: one slot per edge in check-major order, plus
/// the per-variable marginals. Everything stays normalized.
struct MessageState {
    int q = 0;
    std::vector<std::uint32_t> check_offset;  ///< m_sym + 1 edge offsets
    std::vector<double> var_to_check;         ///< edges * q
    std::vector<double> check_to_var;         ///< edges * q
    std::vector<double> marginals;            ///< n_sym * q
    int iteration = 0;
    int annihilations = 0;  ///< vectors that collapsed to zero and were reset

    std::span<double> var_msg(std::uint32_t edge) {
        return {var_to_check.data() + static_cast<std::size_t>(edge) * q, static_cast<std::size_t>(q)};
    }
    std::span<const double> var_msg(std::uint32_t edge) const {
        return {var_to_check.data() + static_cast<std::size_t>(edge) * q, static_cast<std::size_t>(q)};
    }
    std::span<double> check_msg(std::uint32_t edge) {
        return {check_to_var.data() + static_cast<std::size_t>(edge) * q, static_cast<std::size_t>(q)};
    }
    std::span<const double> check_msg(std::uint32_t edge) const {
        return {check_to_var.data() + static_cast<std::size_t>(edge) * q, static_cast<std::size_t>(q)};
    }
    std::span<double> marginal(std::uint32_t v) {
        return {marginals.data() + static_cast<std::size_t>(v) * q, static_cast<std::size_t>(q)};
    }
    std::span<const double> marginal(std::uint32_t v) const {
        return {marginals.data() + static_cast<std::size_t>(v) * q, static_cast<std::size_t>(q)};
    }
};

struct SweepDiagnostics {
    int trial = 0;
    int sweep = 0;
    double gamma = 0.0;
    double max_delta = 0.0;
    int unsat_checks = 0;
    double entropy_proxy = 0.0;  ///< mean marginal entropy / ln q
};
using DiagnosticsFn = std::function<void(const SweepDiagnostics&)>;

enum class RunStatus { Converged, IterationLimit };

struct RbpResult {
    RunStatus status = RunStatus::IterationLimit;
    std::vector<Symbol> codeword;  ///< valid when Converged
    int iterations = 0;            ///< total sweeps across trials
    int trials = 0;
};

struct BpResult {
    bool converged = false;
    int sweeps = 0;
    MessageState state;
};

/// Message-passing engine for one code. Construction precomputes the edge
/// layout and per-edge coefficient permutations; the engine itself is
/// immutable and shareable, every run owns its MessageState.
class Propagator {
public:
    Propagator(const SparseCode& code, const FieldTables& tables);

    const SparseCode& code() const { return *code_; }
    const FieldTables& tables() const { return *tables_; }
    std::uint32_t edge_count() const { return static_cast<std::uint32_t>(edge_var_.size()); }
    std::uint32_t edge_of(std::uint32_t v, std::uint32_t f) const;  ///< throws if absent

    /// Fresh state: variable messages and marginals from the prior, check
    /// messages uniform.
    MessageState make_state(const Prior& prior) const;

    /// Check-node update via coefficient permutation + transform-domain
    /// products (prefix/suffix by default, guarded division optionally),
    /// O(d_f * q * p). Returns the largest entry change; damping mixes the
    /// old message back in.
    double update_check(std::uint32_t f, MessageState& state, bool divide_in_transform = false,
                        double damping = 0.0) const;

    /// Variable-to-check messages. The RBP variant multiplies in the
    /// previous marginal raised to gamma; gamma = 0 is plain BP.
    void update_var_message_bp(std::uint32_t v, std::uint32_t f, MessageState& state,
                               const Prior& prior) const;
    void update_var_message_rbp(std::uint32_t v, std::uint32_t f, MessageState& state,
                                const Prior& prior, double gamma) const;

    /// Marginal at v from the current check messages (and, for gamma > 0,
    /// the previous marginal).
    void update_marginal(std::uint32_t v, MessageState& state, const Prior& prior,
                         double gamma) const;

    /// Reinforced BP with restarts: random-permutation sequential sweeps,
    /// hard decision after each sweep, success when the decision satisfies
    /// every check and either messages are stable or the decision holds two
    /// sweeps in a row. Restarts with fresh scheduling up to t_max trials.
    RbpResult run_rbp(const Prior& prior, const RbpParams& params,
                      const DiagnosticsFn& diag = {}, MessageState* final_state = nullptr) const;

    /// Plain BP (gamma = 0) with damping, run to message stability. Used
    /// for entropy/distance evaluation at the fixed point. The second form
    /// starts from a caller-provided state (warm starts, engineered
    /// trajectories in tests).
    BpResult run_bp_fixed_point(const Prior& prior, const BpParams& params) const;
    BpResult run_bp_fixed_point(const Prior& prior, const BpParams& params,
                                MessageState initial) const;

    std::vector<Symbol> hard_decision(const MessageState& state,
                                      std::span<const double> dither = {}) const;

private:
    struct Scratch;
    void refresh_var_message(std::uint32_t edge, MessageState& state,
                             std::span<const double> weighted_prior) const;
    double sweep(MessageState& state, std::span<const double> weighted_priors,
                 std::span<const std::uint32_t> order, bool divide, double damping) const;

    const SparseCode* code_;
    const FieldTables* tables_;
    std::vector<std::uint32_t> check_offset_;  // m+1
    std::vector<std::uint32_t> edge_var_;      // per edge
    std::vector<Symbol> edge_coef_;            // per edge
    std::vector<std::vector<std::uint32_t>> var_edges_;
    std::vector<std::uint16_t> perm_;  // per edge: q entries, a -> coef*a
    int q_ = 0;
};

}  // namespace gfqc

#endif
