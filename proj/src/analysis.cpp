#include "gfqc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "gfqc/codec.hpp"

namespace gfqc {

double binary_entropy(double d) {
    if (d < 0.0 || d > 1.0) throw std::invalid_argument("entropy argument must be in [0,1]");
    if (d == 0.0 || d == 1.0) return 0.0;
    return -d * std::log2(d) - (1.0 - d) * std::log2(1.0 - d);
}

double rd_rate(double distortion) {
    if (distortion <= 0.0 || distortion > 0.5)
        throw std::invalid_argument("distortion must be in (0, 0.5]");
    return 1.0 - binary_entropy(distortion);
}

double rd_distortion(double rate) {
    if (rate <= 0.0 || rate >= 1.0) throw std::invalid_argument("rate must be in (0,1)");
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        // 1 - H is decreasing on [0, 1/2]
        if (1.0 - binary_entropy(mid) > rate)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double db_above_bound(double achieved, double bound) {
    return 10.0 * std::log10(achieved / bound);
}

double average_distance(const MessageState& state, std::span<const Symbol> source, int p) {
    const std::size_t q = static_cast<std::size_t>(state.q);
    double acc = 0.0;
    for (std::size_t v = 0; v < source.size(); ++v) {
        const auto g = state.marginal(static_cast<std::uint32_t>(v));
        for (std::size_t a = 0; a < q; ++a)
            acc += g[a] * std::popcount(static_cast<unsigned>(a) ^ source[v]);
    }
    return acc / (static_cast<double>(source.size()) * p);
}

double bethe_entropy(const MessageState& state, const SparseCode& code, const Prior& prior,
                     const FieldTables& tables) {
    const std::size_t q = static_cast<std::size_t>(tables.q);
    const auto var_deg = code.variable_degrees();

    double entropy = 0.0;

    // variable terms, prior folded in: b_v ~ mu1_v * prod_f mu_fv
    std::vector<double> var_belief(static_cast<std::size_t>(code.n_sym) * q);
    for (std::uint32_t v = 0; v < code.n_sym; ++v) {
        const auto pv = prior.at(v);
        std::copy(pv.begin(), pv.end(), var_belief.begin() + static_cast<std::ptrdiff_t>(v * q));
    }
    std::uint32_t edge = 0;
    for (std::uint32_t f = 0; f < code.m_sym; ++f) {
        for (const auto& ce : code.checks[f]) {
            const auto msg = state.check_msg(edge);
            double* bv = var_belief.data() + static_cast<std::size_t>(ce.var) * q;
            for (std::size_t a = 0; a < q; ++a) bv[a] *= msg[a];
            ++edge;
        }
    }
    for (std::uint32_t v = 0; v < code.n_sym; ++v) {
        std::span<double> bv{var_belief.data() + static_cast<std::size_t>(v) * q, q};
        normalize(bv);
        double s_v = 0.0;
        for (double x : bv)
            if (x > 0.0) s_v -= x * std::log(x);
        entropy += (1.0 - var_deg[v]) * s_v;
    }

    // factor terms: S_f = ln Z_f - sum_slots sum_a b(a) ln mu_vf(a)
    std::vector<double> w(q), prod(q), marg(q);
    edge = 0;
    for (std::uint32_t f = 0; f < code.m_sym; ++f) {
        const std::uint32_t off = edge;
        const std::uint32_t deg = static_cast<std::uint32_t>(code.checks[f].size());
        std::fill(prod.begin(), prod.end(), 1.0);
        for (std::uint32_t i = 0; i < deg; ++i) {
            const auto msg = state.var_msg(off + i);
            const Symbol h = code.checks[f][i].coef;
            for (std::size_t a = 0; a < q; ++a) w[tables.mul(h, static_cast<Symbol>(a))] = msg[a];
            wht_in_place(std::span<double>(w));
            for (std::size_t s = 0; s < q; ++s) prod[s] *= w[s];
        }
        double z_f = 0.0;
        for (std::size_t s = 0; s < q; ++s) z_f += prod[s];
        z_f /= static_cast<double>(q);
        if (z_f < 1e-300) z_f = 1e-300;
        double s_f = std::log(z_f);

        for (std::uint32_t i = 0; i < deg; ++i) {
            const auto mu_vf = state.var_msg(off + i);
            const auto mu_fv = state.check_msg(off + i);
            for (std::size_t a = 0; a < q; ++a) marg[a] = mu_vf[a] * mu_fv[a];
            normalize(std::span<double>(marg));
            for (std::size_t a = 0; a < q; ++a) {
                if (marg[a] <= 0.0) continue;
                const double mu = mu_vf[a] < 1e-300 ? 1e-300 : mu_vf[a];
                s_f -= marg[a] * std::log(mu);
            }
        }
        entropy += s_f;
        edge += deg;
    }
    return entropy;
}

std::vector<WefPoint> wef_sweep(const SparseCode& code, const FieldTables& tables,
                                std::span<const double> L_grid,
                                std::span<const Symbol> reference, const BpParams& params) {
    if (reference.size() != code.n_sym)
        throw std::invalid_argument("reference word length must equal n_sym");
    for (std::size_t i = 1; i < L_grid.size(); ++i)
        if (L_grid[i] < L_grid[i - 1])
            throw std::invalid_argument("L grid must be sorted ascending");

    const Propagator prop(code, tables);
    const double n_bits = static_cast<double>(code.n_sym) * code.p;
    std::vector<WefPoint> points;
    points.reserve(L_grid.size());
    for (double L : L_grid) {
        const Prior prior = build_prior(reference, L, tables);
        BpResult bp = prop.run_bp_fixed_point(prior, params);
        WefPoint pt;
        pt.L = L;
        pt.converged = bp.converged;
        pt.sweeps = bp.sweeps;
        pt.avg_distance = average_distance(bp.state, reference, code.p);
        pt.entropy_density = bethe_entropy(bp.state, code, prior, tables) / (n_bits * std::log(2.0));
        points.push_back(pt);
    }
    return points;
}

}  // namespace gfqc
