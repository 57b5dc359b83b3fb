#include "gfqc/peeling.hpp"

#include <algorithm>

#include "gfqc/rng.hpp"

namespace gfqc {

PeelOrder leaf_removal(const SparseCode& code, std::uint64_t order_seed) {
    const std::uint32_t n = code.n_sym;
    const std::uint32_t m = code.m_sym;

    std::vector<std::vector<std::uint32_t>> var_checks(n);
    for (std::uint32_t f = 0; f < m; ++f)
        for (const auto& e : code.checks[f]) var_checks[e.var].push_back(f);

    std::vector<int> var_deg(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) var_deg[v] = static_cast<int>(var_checks[v].size());
    std::vector<bool> check_alive(m, true);
    std::vector<bool> var_removed(n, false);

    std::vector<std::uint32_t> worklist;
    for (std::uint32_t v = 0; v < n; ++v)
        if (var_deg[v] == 1) worklist.push_back(v);

    Rng rng(order_seed);
    PeelOrder order;

    std::size_t head = 0;
    while (head < worklist.size()) {
        std::uint32_t v;
        if (order_seed == 0) {
            v = worklist[head++];
        } else {
            const std::size_t j = head + static_cast<std::size_t>(
                                             rng.below(worklist.size() - head));
            std::swap(worklist[head], worklist[j]);
            v = worklist[head++];
        }
        if (var_removed[v] || var_deg[v] != 1) continue;  // stale entry

        // the unique surviving check of v
        std::uint32_t f = 0;
        for (std::uint32_t c : var_checks[v])
            if (check_alive[c]) { f = c; break; }

        PeelStep step;
        step.check = f;
        step.pivot = v;
        for (const auto& e : code.checks[f]) {
            if (e.var != v && var_deg[e.var] == 1) step.freed.push_back(e.var);
        }
        std::sort(step.freed.begin(), step.freed.end());

        check_alive[f] = false;
        var_removed[v] = true;
        var_deg[v] = 0;
        for (std::uint32_t u : step.freed) {
            var_removed[u] = true;
            var_deg[u] = 0;
        }
        for (const auto& e : code.checks[f]) {
            if (var_removed[e.var]) continue;
            if (--var_deg[e.var] == 1) worklist.push_back(e.var);
        }
        order.steps.push_back(std::move(step));
    }

    for (std::uint32_t f = 0; f < m; ++f)
        if (check_alive[f]) order.core_checks.push_back(f);

    for (const auto& step : order.steps)
        order.payload_order.insert(order.payload_order.end(), step.freed.begin(),
                                   step.freed.end());
    for (std::uint32_t v = 0; v < n; ++v)
        if (var_checks[v].empty()) order.payload_order.push_back(v);

    order.info_set = order.payload_order;
    std::sort(order.info_set.begin(), order.info_set.end());

    // flatten the back-substitution schedule in replay (reverse) order
    order.replay_offset.push_back(0);
    for (auto it = order.steps.rbegin(); it != order.steps.rend(); ++it) {
        order.replay_pivot.push_back(it->pivot);
        for (const auto& e : code.checks[it->check]) {
            if (e.var == it->pivot) {
                order.replay_pivot_coef.push_back(e.coef);
            } else {
                order.replay_var.push_back(e.var);
                order.replay_coef.push_back(e.coef);
            }
        }
        order.replay_offset.push_back(static_cast<std::uint32_t>(order.replay_var.size()));
    }

    // relabel by first use so the decoder's working array is accessed in
    // near-streaming order
    constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
    order.local_of_var.assign(n, kUnset);
    std::uint32_t next_label = 0;
    auto touch = [&](std::uint32_t v) {
        if (order.local_of_var[v] == kUnset) order.local_of_var[v] = next_label++;
    };
    for (std::uint32_t v : order.payload_order) touch(v);
    for (std::size_t s = 0; s < order.replay_pivot.size(); ++s) {
        for (std::uint32_t i = order.replay_offset[s]; i < order.replay_offset[s + 1]; ++i)
            touch(order.replay_var[i]);
        touch(order.replay_pivot[s]);
    }
    for (std::uint32_t v = 0; v < n; ++v) touch(v);  // core variables, if any
    for (auto& v : order.replay_var) v = order.local_of_var[v];
    for (auto& v : order.replay_pivot) v = order.local_of_var[v];
    return order;
}

}  // namespace gfqc
