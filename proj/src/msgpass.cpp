#include "gfqc/msgpass.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gfqc/rng.hpp"

namespace gfqc {

namespace {

constexpr double kDivisionGuard = 1e-12;

void validate(const RbpParams& p) {
    if (p.gamma0 < 0.0 || p.gamma0 > 1.0 || p.gamma1 < 0.0 || p.gamma1 > 1.0)
        throw std::invalid_argument("gamma0 and gamma1 must lie in [0,1]");
    if (p.ell_max < 1 || p.t_max < 1) throw std::invalid_argument("ell_max and t_max must be >= 1");
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

}  // namespace

struct Propagator::Scratch {
    std::vector<double> w;       // transformed incoming messages, d * q
    std::vector<double> prefix;  // (d + 1) * q running products
    std::vector<double> suffix;  // (d + 1) * q
    std::vector<double> conv;    // q
    std::vector<double> full;    // q, division variant
    std::vector<double> tmp;     // q, readout staging

    void ensure(std::size_t d_max, int q) {
        const std::size_t qz = static_cast<std::size_t>(q);
        if (w.size() < d_max * qz) {
            w.resize(d_max * qz);
            prefix.resize((d_max + 1) * qz);
            suffix.resize((d_max + 1) * qz);
        }
        if (conv.size() < qz) {
            conv.resize(qz);
            full.resize(qz);
            tmp.resize(qz);
        }
    }
};

Propagator::Propagator(const SparseCode& code, const FieldTables& tables)
    : code_(&code), tables_(&tables), q_(tables.q) {
    if (code.p != tables.p)
        throw std::invalid_argument("code and field tables disagree on p");
    check_offset_.reserve(code.m_sym + 1);
    check_offset_.push_back(0);
    for (const auto& c : code.checks) {
        for (const auto& e : c) {
            edge_var_.push_back(e.var);
            edge_coef_.push_back(e.coef);
        }
        check_offset_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
    }
    var_edges_.resize(code.n_sym);
    for (std::uint32_t e = 0; e < edge_var_.size(); ++e)
        var_edges_[edge_var_[e]].push_back(e);

    const std::size_t qz = static_cast<std::size_t>(q_);
    perm_.resize(edge_var_.size() * qz);
    for (std::size_t e = 0; e < edge_var_.size(); ++e) {
        const Symbol h = edge_coef_[e];
        for (std::size_t a = 0; a < qz; ++a)
            perm_[e * qz + a] = tables.mul(h, static_cast<Symbol>(a));
    }
}

std::uint32_t Propagator::edge_of(std::uint32_t v, std::uint32_t f) const {
    for (std::uint32_t e : var_edges_[v]) {
        const auto it = std::upper_bound(check_offset_.begin(), check_offset_.end(), e);
        const auto check = static_cast<std::uint32_t>(it - check_offset_.begin() - 1);
        if (check == f) return e;
    }
    throw std::invalid_argument("no edge between the given variable and check");
}

MessageState Propagator::make_state(const Prior& prior) const {
    if (prior.table.size() != static_cast<std::size_t>(code_->n_sym) * q_)
        throw std::invalid_argument("prior size does not match the code");
    MessageState st;
    st.q = q_;
    st.check_offset = check_offset_;
    const std::size_t qz = static_cast<std::size_t>(q_);
    st.var_to_check.resize(edge_var_.size() * qz);
    st.check_to_var.assign(edge_var_.size() * qz, 1.0 / q_);
    st.marginals = prior.table;
    for (std::size_t e = 0; e < edge_var_.size(); ++e) {
        const auto pv = prior.at(edge_var_[e]);
        std::copy(pv.begin(), pv.end(), st.var_to_check.begin() + static_cast<std::ptrdiff_t>(e * qz));
    }
    return st;
}

double Propagator::update_check(std::uint32_t f, MessageState& state, bool divide_in_transform,
                                double damping) const {
    thread_local Scratch scratch;
    const std::uint32_t off = check_offset_[f];
    const std::uint32_t d = check_offset_[f + 1] - off;
    scratch.ensure(d, q_);

    const std::size_t qz = static_cast<std::size_t>(q_);
    double* w = scratch.w.data();
    double* conv = scratch.conv.data();

    // permute each incoming belief by its coefficient, then transform
    for (std::uint32_t i = 0; i < d; ++i) {
        const std::uint32_t e = off + i;
        const auto msg = state.var_msg(e);
        const std::uint16_t* perm = perm_.data() + static_cast<std::size_t>(e) * qz;
        double* wi = w + i * qz;
        for (std::size_t a = 0; a < qz; ++a) wi[perm[a]] = msg[a];
        wht_in_place({wi, qz});
    }

    double* pre = scratch.prefix.data();
    double* suf = scratch.suffix.data();
    if (!divide_in_transform) {
        std::fill(pre, pre + qz, 1.0);
        for (std::uint32_t i = 0; i < d; ++i)
            for (std::size_t s = 0; s < qz; ++s)
                pre[(i + 1) * qz + s] = pre[i * qz + s] * w[i * qz + s];
        std::fill(suf + d * qz, suf + (d + 1) * qz, 1.0);
        for (std::uint32_t i = d; i-- > 0;)
            for (std::size_t s = 0; s < qz; ++s)
                suf[i * qz + s] = suf[(i + 1) * qz + s] * w[i * qz + s];
    } else {
        double* full = scratch.full.data();
        std::fill(full, full + qz, 1.0);
        for (std::uint32_t i = 0; i < d; ++i)
            for (std::size_t s = 0; s < qz; ++s) full[s] *= w[i * qz + s];
    }

    double max_delta = 0.0;
    for (std::uint32_t i = 0; i < d; ++i) {
        const std::uint32_t e = off + i;
        if (!divide_in_transform) {
            for (std::size_t s = 0; s < qz; ++s)
                conv[s] = pre[i * qz + s] * suf[(i + 1) * qz + s];
        } else {
            const double* full = scratch.full.data();
            for (std::size_t s = 0; s < qz; ++s) {
                const double wis = w[i * qz + s];
                if (std::abs(wis) < kDivisionGuard) {
                    double prod = 1.0;  // recompute this entry without the division
                    for (std::uint32_t j = 0; j < d; ++j)
                        if (j != i) prod *= w[j * qz + s];
                    conv[s] = prod;
                } else {
                    conv[s] = full[s] / wis;
                }
            }
        }
        // second transform inverts up to the factor q, absorbed by normalization
        wht_in_place({conv, qz});

        auto out = state.check_msg(e);
        const std::uint16_t* perm = perm_.data() + static_cast<std::size_t>(e) * qz;
        double* tmp = scratch.tmp.data();
        double sum = 0.0;
        for (std::size_t a = 0; a < qz; ++a) {
            double val = conv[perm[a]];
            if (val < 0.0) val = 0.0;  // transform roundoff
            tmp[a] = val;
            sum += val;
        }
        if (!(sum > 0.0) || !std::isfinite(sum)) {
            ++state.annihilations;
            for (std::size_t a = 0; a < qz; ++a) tmp[a] = 1.0;
            sum = static_cast<double>(qz);
        }
        const double inv_sum = 1.0 / sum;
        for (std::size_t a = 0; a < qz; ++a) {
            double nv = tmp[a] * inv_sum;
            if (damping > 0.0) nv = (1.0 - damping) * nv + damping * out[a];
            const double delta = std::abs(nv - out[a]);
            if (delta > max_delta) max_delta = delta;
            out[a] = nv;
        }
    }
    return max_delta;
}

namespace {

// out = weighted_prior (x) product of check messages into v, skipping one
// edge; normalized, collapse flagged.
void compose_var(std::span<const std::uint32_t> edges, std::int64_t exclude,
                 std::span<const double> weighted_prior, MessageState& state,
                 std::span<double> out) {
    std::copy(weighted_prior.begin(), weighted_prior.end(), out.begin());
    for (std::uint32_t e : edges) {
        if (static_cast<std::int64_t>(e) == exclude) continue;
        const auto msg = state.check_msg(e);
        for (std::size_t a = 0; a < out.size(); ++a) out[a] *= msg[a];
    }
    if (!normalize(out)) ++state.annihilations;
}

}  // namespace

void Propagator::refresh_var_message(std::uint32_t edge, MessageState& state,
                                     std::span<const double> weighted_prior) const {
    compose_var(var_edges_[edge_var_[edge]], static_cast<std::int64_t>(edge), weighted_prior,
                state, state.var_msg(edge));
}

void Propagator::update_var_message_bp(std::uint32_t v, std::uint32_t f, MessageState& state,
                                       const Prior& prior) const {
    const std::uint32_t e = edge_of(v, f);
    compose_var(var_edges_[v], static_cast<std::int64_t>(e), prior.at(v), state,
                state.var_msg(e));
}

void Propagator::update_var_message_rbp(std::uint32_t v, std::uint32_t f, MessageState& state,
                                        const Prior& prior, double gamma) const {
    const std::uint32_t e = edge_of(v, f);
    const auto pv = prior.at(v);
    const auto g = state.marginal(v);
    std::vector<double> wp(static_cast<std::size_t>(q_));
    for (std::size_t a = 0; a < wp.size(); ++a)
        wp[a] = pv[a] * (gamma == 0.0 ? 1.0 : std::pow(g[a], gamma));
    compose_var(var_edges_[v], static_cast<std::int64_t>(e), wp, state, state.var_msg(e));
}

void Propagator::update_marginal(std::uint32_t v, MessageState& state, const Prior& prior,
                                 double gamma) const {
    const auto pv = prior.at(v);
    const auto g = state.marginal(v);
    std::vector<double> wp(static_cast<std::size_t>(q_));
    for (std::size_t a = 0; a < wp.size(); ++a)
        wp[a] = pv[a] * (gamma == 0.0 ? 1.0 : std::pow(g[a], gamma));
    compose_var(var_edges_[v], -1, wp, state, state.marginal(v));
}

double Propagator::sweep(MessageState& state, std::span<const double> weighted_priors,
                         std::span<const std::uint32_t> order, bool divide,
                         double damping) const {
    const std::size_t qz = static_cast<std::size_t>(q_);
    double max_delta = 0.0;
    for (std::uint32_t f : order) {
        for (std::uint32_t e = check_offset_[f]; e < check_offset_[f + 1]; ++e) {
            const std::uint32_t v = edge_var_[e];
            refresh_var_message(e, state,
                                weighted_priors.subspan(static_cast<std::size_t>(v) * qz, qz));
        }
        const double delta = update_check(f, state, divide, damping);
        if (delta > max_delta) max_delta = delta;
    }
    return max_delta;
}

std::vector<Symbol> Propagator::hard_decision(const MessageState& state,
                                              std::span<const double> dither) const {
    const std::size_t qz = static_cast<std::size_t>(q_);
    std::vector<Symbol> word(code_->n_sym, 0);
    for (std::uint32_t v = 0; v < code_->n_sym; ++v) {
        const auto g = state.marginal(v);
        double best = -1.0;
        Symbol arg = 0;
        for (std::size_t a = 0; a < qz; ++a) {
            const double val = g[a] + (dither.empty() ? 0.0 : dither[static_cast<std::size_t>(v) * qz + a]);
            if (val > best) {  // ties keep the lowest symbol
                best = val;
                arg = static_cast<Symbol>(a);
            }
        }
        word[v] = arg;
    }
    return word;
}

RbpResult Propagator::run_rbp(const Prior& prior, const RbpParams& params,
                              const DiagnosticsFn& diag, MessageState* final_state) const {
    validate(params);
    const std::uint32_t n = code_->n_sym;
    const std::uint32_t m = code_->m_sym;
    const std::size_t qz = static_cast<std::size_t>(q_);

    RbpResult res;
    std::vector<double> wprior(static_cast<std::size_t>(n) * qz);
    std::vector<std::uint32_t> order(m);
    std::vector<double> dither(static_cast<std::size_t>(n) * qz);
    MessageState state;

    const double log_q = std::log(static_cast<double>(q_));

    for (int trial = 1; trial <= params.t_max; ++trial) {
        state = make_state(prior);
        Rng rng(derive_seed(params.schedule_seed, static_cast<std::uint64_t>(trial)));
        for (auto& x : dither) x = 1e-12 * rng.unit();
        std::iota(order.begin(), order.end(), 0u);
        int sat_streak = 0;

        for (int ell = 0; ell < params.ell_max; ++ell) {
            const double gamma = 1.0 - params.gamma0 * std::pow(params.gamma1, ell);

            // reinforced prior for this sweep, from last sweep's marginals
            for (std::uint32_t v = 0; v < n; ++v) {
                const auto pv = prior.at(v);
                const auto g = state.marginal(v);
                double* wp = wprior.data() + static_cast<std::size_t>(v) * qz;
                if (gamma == 0.0) {
                    std::copy(pv.begin(), pv.end(), wp);
                } else if (gamma == 1.0) {
                    for (std::size_t a = 0; a < qz; ++a) wp[a] = pv[a] * g[a];
                } else {
                    for (std::size_t a = 0; a < qz; ++a) wp[a] = pv[a] * std::pow(g[a], gamma);
                }
            }

            rng.shuffle(order);
            const double max_delta =
                sweep(state, wprior, order, params.divide_in_transform, 0.0);
            for (std::uint32_t v = 0; v < n; ++v) {
                auto out = state.marginal(v);
                compose_var(var_edges_[v], -1,
                            {wprior.data() + static_cast<std::size_t>(v) * qz, qz}, state, out);
            }
            ++state.iteration;
            ++res.iterations;

            const auto decision = hard_decision(state, dither);
            const int unsat = unsatisfied_checks(*code_, *tables_, decision);
            sat_streak = (unsat == 0) ? sat_streak + 1 : 0;

            if (diag) {
                double hsum = 0.0;
                for (std::uint32_t v = 0; v < n; ++v)
                    for (double x : state.marginal(v))
                        if (x > 0.0) hsum -= x * std::log(x);
                diag({trial, ell, gamma, max_delta, unsat, hsum / (n * log_q)});
            }

            if (unsat == 0 && (max_delta < params.epsilon || sat_streak >= 2)) {
                res.status = RunStatus::Converged;
                res.codeword = decision;
                res.trials = trial;
                if (final_state) *final_state = std::move(state);
                return res;
            }
        }
    }
    res.status = RunStatus::IterationLimit;
    res.trials = params.t_max;
    if (final_state) *final_state = std::move(state);
    return res;
}

BpResult Propagator::run_bp_fixed_point(const Prior& prior, const BpParams& params) const {
    return run_bp_fixed_point(prior, params, make_state(prior));
}

BpResult Propagator::run_bp_fixed_point(const Prior& prior, const BpParams& params,
                                        MessageState initial) const {
    if (params.ell_max < 1) throw std::invalid_argument("ell_max must be >= 1");
    if (!(params.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (params.damping < 0.0 || params.damping >= 1.0)
        throw std::invalid_argument("damping must lie in [0,1)");

    BpResult res;
    res.state = std::move(initial);
    std::vector<std::uint32_t> order(code_->m_sym);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(derive_seed(params.schedule_seed, 1));

    for (int ell = 0; ell < params.ell_max; ++ell) {
        rng.shuffle(order);
        const double max_delta = sweep(res.state, prior.table, order, false, params.damping);
        ++res.sweeps;
        ++res.state.iteration;
        if (max_delta < params.epsilon) {
            res.converged = true;
            break;
        }
    }
    for (std::uint32_t v = 0; v < code_->n_sym; ++v) {
        auto out = res.state.marginal(v);
        compose_var(var_edges_[v], -1, prior.at(v), res.state, out);
    }
    return res;
}

}  // namespace gfqc
