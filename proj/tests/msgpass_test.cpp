#include "doctest.h"

#include <cmath>
#include <cstring>

#include "gfqc/codec.hpp"
#include "gfqc/linalg.hpp"
#include "gfqc/msgpass.hpp"
#include "gfqc/peeling.hpp"
#include "oracles.hpp"

using namespace gfqc;

namespace {

Prior uniform_prior(std::uint32_t n, int q) {
    Prior prior;
    prior.q = q;
    prior.table.assign(static_cast<std::size_t>(n) * q, 1.0 / q);
    return prior;
}

void set_delta(std::span<double> v, Symbol a) {
    std::fill(v.begin(), v.end(), 0.0);
    v[a] = 1.0;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("degree-2 check with unit coefficients passes deltas through") {
    const FieldTables t = build_field_tables(3);
    SparseCode code;
    code.p = 3;
    code.n_sym = 2;
    code.m_sym = 1;
    code.checks = {{{0, 1}, {1, 1}}};
    const Propagator prop(code, t);
    const Prior prior = uniform_prior(2, t.q);
    MessageState st = prop.make_state(prior);
    for (Symbol s = 0; s < t.q; ++s) {
        set_delta(st.var_msg(0), s);
        prop.update_check(0, st);
        // message to the *other* variable reflects the incoming delta
        const auto out = st.check_msg(1);
        for (int a = 0; a < t.q; ++a)
            CHECK(out[static_cast<std::size_t>(a)] == doctest::Approx(a == s ? 1.0 : 0.0));
    }
}

TEST_CASE("check update equals the configuration-sum oracle") {
    Rng rng(2024);
    for (int p : {1, 2, 3, 4}) {
        const FieldTables t = build_field_tables(p);
        for (int deg = 2; deg <= 4; ++deg) {
            for (int rep = 0; rep < 8; ++rep) {
                SparseCode code;
                code.p = p;
                code.n_sym = static_cast<std::uint32_t>(deg);
                code.m_sym = 1;
                std::vector<CodeEdge> row;
                for (int i = 0; i < deg; ++i)
                    row.push_back({static_cast<std::uint32_t>(i),
                                   static_cast<Symbol>(1 + rng.below(static_cast<std::uint64_t>(t.q - 1)))});
                code.checks = {row};
                const Propagator prop(code, t);
                const Prior prior = uniform_prior(code.n_sym, t.q);
                MessageState st = prop.make_state(prior);

                std::vector<std::vector<double>> incoming;
                for (int i = 0; i < deg; ++i) {
                    auto msg = test::random_distribution(t.q, rng);
                    std::copy(msg.begin(), msg.end(), st.var_msg(static_cast<std::uint32_t>(i)).begin());
                    incoming.push_back(std::move(msg));
                }

                const bool divide = rep % 2 == 1;
                prop.update_check(0, st, divide);
                for (int i = 0; i < deg; ++i) {
                    auto want = test::direct_check_message(row, incoming, static_cast<std::size_t>(i), t);
                    normalize(std::span<double>(want));
                    const auto got = st.check_msg(static_cast<std::uint32_t>(i));
                    for (int a = 0; a < t.q; ++a)
                        CHECK(std::abs(got[static_cast<std::size_t>(a)] -
                                       want[static_cast<std::size_t>(a)]) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("both product strategies agree") {
    Rng rng(5);
    const FieldTables t = build_field_tables(4);
    SparseCode code;
    code.p = 4;
    code.n_sym = 5;
    code.m_sym = 1;
    std::vector<CodeEdge> row;
    for (std::uint32_t i = 0; i < 5; ++i)
        row.push_back({i, static_cast<Symbol>(1 + rng.below(15))});
    code.checks = {row};
    const Propagator prop(code, t);
    const Prior prior = uniform_prior(5, 16);
    MessageState a = prop.make_state(prior);
    for (std::uint32_t e = 0; e < 5; ++e) {
        const auto msg = test::random_distribution(16, rng);
        std::copy(msg.begin(), msg.end(), a.var_msg(e).begin());
    }
    MessageState b = a;
    prop.update_check(0, a, false);
    prop.update_check(0, b, true);
    for (std::uint32_t e = 0; e < 5; ++e)
        CHECK(max_abs_diff(a.check_msg(e), b.check_msg(e)) < 1e-12);
}

TEST_CASE("check update costs exactly 2*d transforms of q*p operations") {
    const FieldTables t = build_field_tables(4);
    SparseCode code;
    code.p = 4;
    code.n_sym = 3;
    code.m_sym = 1;
    code.checks = {{{0, 1}, {1, 2}, {2, 3}}};
    const Propagator prop(code, t);
    MessageState st = prop.make_state(uniform_prior(3, 16));
    reset_wht_op_count();
    prop.update_check(0, st);
    CHECK(wht_op_count() == 2ull * 3 * 16 * 4);
}

TEST_CASE("uniform incoming messages stay uniform") {
    const FieldTables t = build_field_tables(2);
    SparseCode code;
    code.p = 2;
    code.n_sym = 3;
    code.m_sym = 1;
    code.checks = {{{0, 1}, {1, 2}, {2, 3}}};
    const Propagator prop(code, t);
    MessageState st = prop.make_state(uniform_prior(3, 4));
    prop.update_check(0, st);
    for (std::uint32_t e = 0; e < 3; ++e)
        for (double x : st.check_msg(e)) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("variable updates") {
    const FieldTables t = build_field_tables(2);
    // v0 sits on two checks; v1, v2 complete them
    SparseCode code;
    code.p = 2;
    code.n_sym = 3;
    code.m_sym = 2;
    code.checks = {{{0, 1}, {1, 1}}, {{0, 2}, {2, 3}}};
    const Propagator prop(code, t);

    Prior prior = uniform_prior(3, 4);
    prior.table[0] = 0.4;  // v0 prior (.4,.2,.2,.2)
    prior.table[1] = 0.2;
    prior.table[2] = 0.2;
    prior.table[3] = 0.2;

    MessageState st = prop.make_state(prior);
    set_delta(st.check_msg(2), 1);  // message from check 1 into v0

    SUBCASE("degree-2 variable: message equals prior times the other check") {
        prop.update_var_message_bp(0, 0, st, prior);
        const auto out = st.var_msg(0);
        // prior (x) delta at 1, normalized -> delta at 1
        CHECK(out[1] == doctest::Approx(1.0));
    }

    SUBCASE("message to a check excludes that check's own message") {
        set_delta(st.check_msg(0), 2);  // incoming from check 0 into v0
        prop.update_var_message_bp(0, 1, st, prior);
        const auto out = st.var_msg(2);
        CHECK(out[2] == doctest::Approx(1.0));  // only check 0's delta remains
    }

    SUBCASE("degree-1 variable: message equals the normalized prior") {
        prop.update_var_message_bp(1, 0, st, prior);
        const auto out = st.var_msg(1);
        for (int a = 0; a < 4; ++a) CHECK(out[static_cast<std::size_t>(a)] == doctest::Approx(0.25));
    }

    SUBCASE("rbp with gamma 0 reduces exactly to bp") {
        // gamma(0) = 1 - gamma0*gamma1^0 = 0 when gamma0 = 1
        auto g = st.marginal(0);
        g[0] = 0.7; g[1] = 0.1; g[2] = 0.1; g[3] = 0.1;
        MessageState bp = st;
        prop.update_var_message_bp(0, 0, bp, prior);
        MessageState rbp = st;
        prop.update_var_message_rbp(0, 0, rbp, prior, /*gamma=*/0.0);
        CHECK(max_abs_diff(bp.var_msg(0), rbp.var_msg(0)) == 0.0);
    }
}

TEST_CASE("pure reinforcement drives the marginal to the prior's argmax") {
    const FieldTables t = build_field_tables(2);
    SparseCode code;  // one variable, no checks
    code.p = 2;
    code.n_sym = 1;
    code.m_sym = 0;
    const Propagator prop(code, t);
    Prior prior = uniform_prior(1, 4);
    prior.table = {0.2, 0.35, 0.3, 0.15};
    MessageState st = prop.make_state(prior);
    for (int iter = 0; iter < 400; ++iter) prop.update_marginal(0, st, prior, /*gamma=*/1.0);
    const auto g = st.marginal(0);
    CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a codeword with a strong prior is recovered within two sweeps") {
    const FieldTables t = build_field_tables(2);
    const SparseCode code = make_code(2, 60, 30, 2, 11);
    const auto order = leaf_removal(code);
    REQUIRE(order.core_empty());
    const std::vector<Symbol> zero(code.n_sym, 0);
    const Prior prior = build_prior(zero, 2.0, t);
    const Propagator prop(code, t);
    RbpParams params;
    params.gamma0 = 0.92;
    params.schedule_seed = 3;
    const RbpResult res = prop.run_rbp(prior, params);
    REQUIRE(res.status == RunStatus::Converged);
    CHECK(res.codeword == zero);
    CHECK(res.iterations <= 2);
    CHECK(res.trials == 1);
}

TEST_CASE("iteration cap of one exhausts every trial on a hard instance") {
    const FieldTables t = build_field_tables(2);
    const SparseCode code = make_code(2, 60, 40, 2, 19);
    const auto word = test::random_word(code.n_sym, 4, 77);
    const Prior prior = build_prior(word, 1.0, t);
    const Propagator prop(code, t);
    RbpParams params;
    params.ell_max = 1;
    params.t_max = 4;
    params.schedule_seed = 1;
    const RbpResult res = prop.run_rbp(prior, params);
    CHECK(res.status == RunStatus::IterationLimit);
    CHECK(res.trials == 4);
    CHECK(res.iterations == 4);
}

TEST_CASE("identical seeds give identical trajectories") {
    const FieldTables t = build_field_tables(3);
    const SparseCode code = make_code(3, 90, 50, 2, 5);
    const auto word = test::random_word(code.n_sym, 8, 123);
    const Prior prior = build_prior(word, 1.5, t);
    const Propagator prop(code, t);
    RbpParams params;
    params.gamma0 = 0.9;
    params.schedule_seed = 42;

    MessageState s1, s2;
    const RbpResult r1 = prop.run_rbp(prior, params, {}, &s1);
    const RbpResult r2 = prop.run_rbp(prior, params, {}, &s2);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.trials == r2.trials);
    CHECK(r1.codeword == r2.codeword);
    REQUIRE(s1.marginals.size() == s2.marginals.size());
    CHECK(std::memcmp(s1.marginals.data(), s2.marginals.data(),
                      s1.marginals.size() * sizeof(double)) == 0);
}

TEST_CASE("delta state on a codeword is a fixed point of the reinforced sweep") {
    const FieldTables t = build_field_tables(2);
    const SparseCode code = make_code(2, 40, 24, 2, 9);
    const auto order = leaf_removal(code);
    REQUIRE(order.core_empty());

    // a nonzero codeword from the elimination oracle keeps the test honest
    std::vector<std::optional<Symbol>> fixed(code.n_sym);
    fixed[order.info_set[0]] = 2;
    const auto solved = gaussian_solve(code, t, fixed);
    REQUIRE(solved.feasible);
    const std::vector<Symbol>& word = solved.word;
    REQUIRE(codeword_satisfies(code, t, word));

    const Prior prior = build_prior(word, 1.0, t);
    const Propagator prop(code, t);
    MessageState st = prop.make_state(prior);
    for (std::uint32_t f = 0, e = 0; f < code.m_sym; ++f)
        for (const auto& edge : code.checks[f]) {
            set_delta(st.var_msg(e), word[edge.var]);
            set_delta(st.check_msg(e), word[edge.var]);
            ++e;
        }
    for (std::uint32_t v = 0; v < code.n_sym; ++v) set_delta(st.marginal(v), word[v]);

    // one full reinforced sweep with constant gamma < 1
    const double gamma = 1.0 - 0.92;
    double max_delta = 0.0;
    for (std::uint32_t f = 0; f < code.m_sym; ++f) {
        for (const auto& edge : code.checks[f]) {
            MessageState before = st;
            prop.update_var_message_rbp(edge.var, f, st, prior, gamma);
            max_delta = std::max(max_delta, max_abs_diff(before.var_msg(prop.edge_of(edge.var, f)),
                                                         st.var_msg(prop.edge_of(edge.var, f))));
        }
        max_delta = std::max(max_delta, prop.update_check(f, st));
    }
    for (std::uint32_t v = 0; v < code.n_sym; ++v) {
        MessageState before = st;
        prop.update_marginal(v, st, prior, gamma);
        max_delta = std::max(max_delta, max_abs_diff(before.marginal(v), st.marginal(v)));
    }
    CHECK(max_delta < 1e-9);
}

TEST_CASE("bp is exact on trees") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const FieldTables t = build_field_tables(2);
        const SparseCode code = test::random_tree_code(8, 2, seed);
        const auto y = test::random_word(code.n_sym, 4, seed + 100);
        const Prior prior = build_prior(y, 1.2, t);
        const Propagator prop(code, t);
        BpParams params;
        params.damping = 0.0;  // finite convergence on trees
        params.epsilon = 1e-12;
        params.ell_max = 200;
        const BpResult bp = prop.run_bp_fixed_point(prior, params);
        REQUIRE(bp.converged);

        const auto oracle = test::enumerate_gibbs(code, t, prior, y);
        for (std::uint32_t v = 0; v < code.n_sym; ++v)
            for (int a = 0; a < 4; ++a)
                CHECK(std::abs(bp.state.marginal(v)[static_cast<std::size_t>(a)] -
                               oracle.marginals[v][static_cast<std::size_t>(a)]) < 1e-8);
    }
}

TEST_CASE("uniform prior makes uniform messages an immediate fixed point") {
    const FieldTables t = build_field_tables(4);
    const SparseCode code = build_peg_code(80, 0.5, 4, 2);
    const Propagator prop(code, t);
    const Prior prior = uniform_prior(code.n_sym, 16);
    const BpResult bp = prop.run_bp_fixed_point(prior, BpParams{});
    CHECK(bp.converged);
    CHECK(bp.sweeps == 1);
    for (std::uint32_t v = 0; v < code.n_sym; ++v)
        for (double x : bp.state.marginal(v)) CHECK(x == doctest::Approx(1.0 / 16));
}

TEST_CASE("rotating messages on a loop are reported as non-convergent") {
    // two variables joined by two checks whose coefficient loop multiplies
    // by a non-unit symbol: undamped messages rotate forever (period 3 in
    // GF(4), the multiplicative order)
    const FieldTables t = build_field_tables(2);
    SparseCode code;
    code.p = 2;
    code.n_sym = 2;
    code.m_sym = 2;
    code.checks = {{{0, 1}, {1, 1}}, {{0, 1}, {1, 2}}};
    const Propagator prop(code, t);
    const Prior prior = uniform_prior(2, 4);
    MessageState init = prop.make_state(prior);
    // seed the check->var side: variable messages are refreshed from these
    // before every check fires, so that is where asymmetry must live
    for (std::uint32_t e = 0; e < 4; ++e) set_delta(init.check_msg(e), 1);

    BpParams params;
    params.damping = 0.0;
    params.ell_max = 60;
    params.epsilon = 1e-9;
    const BpResult bp = prop.run_bp_fixed_point(prior, params, std::move(init));
    CHECK(!bp.converged);
    CHECK(bp.sweeps == 60);
}

TEST_CASE("messages stay normalized through a run") {
    const FieldTables t = build_field_tables(3);
    const SparseCode code = make_code(3, 120, 70, 3, 8);
    const auto y = test::random_word(code.n_sym, 8, 55);
    const Prior prior = build_prior(y, 1.5, t);
    const Propagator prop(code, t);
    RbpParams params;
    params.gamma0 = 0.9;
    params.ell_max = 40;
    params.t_max = 1;
    MessageState st;
    prop.run_rbp(prior, params, {}, &st);
    const std::size_t q = 8;
    for (std::size_t e = 0; e * q < st.var_to_check.size(); ++e) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t a = 0; a < q; ++a) {
            s1 += st.var_to_check[e * q + a];
            s2 += st.check_to_var[e * q + a];
        }
        CHECK(std::abs(s1 - 1.0) < 1e-9);
        CHECK(std::abs(s2 - 1.0) < 1e-9);
    }
    for (std::uint32_t v = 0; v < code.n_sym; ++v) {
        double s = 0.0;
        for (double x : st.marginal(v)) s += x;
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("conflicting hard priors trip the annihilation counter") {
    const FieldTables t = build_field_tables(1);
    SparseCode code;
    code.p = 1;
    code.n_sym = 2;
    code.m_sym = 1;
    code.checks = {{{0, 1}, {1, 1}}};  // forces equality over GF(2)
    const Propagator prop(code, t);
    // L = 800 underflows exp(-L) to an exact zero: truly contradictory deltas
    std::vector<Symbol> y{0, 1};
    const Prior prior = build_prior(y, 800.0, t);
    BpParams params;
    params.ell_max = 5;
    params.damping = 0.0;  // keep the zeros exact
    const BpResult bp = prop.run_bp_fixed_point(prior, params);
    CHECK(bp.state.annihilations > 0);
}

TEST_CASE("schedule gamma follows 1 - gamma0*gamma1^ell") {
    const FieldTables t = build_field_tables(2);
    const SparseCode code = make_code(2, 40, 24, 1, 3);
    const auto y = test::random_word(code.n_sym, 4, 9);
    const Prior prior = build_prior(y, 1.0, t);
    const Propagator prop(code, t);
    RbpParams params;
    params.gamma0 = 0.8;
    params.gamma1 = 0.9;
    params.ell_max = 5;
    params.t_max = 1;
    std::vector<double> gammas;
    prop.run_rbp(prior, params, [&](const SweepDiagnostics& d) { gammas.push_back(d.gamma); });
    REQUIRE(gammas.size() >= 2);
    for (std::size_t i = 0; i < gammas.size(); ++i)
        CHECK(gammas[i] ==
              doctest::Approx(1.0 - 0.8 * std::pow(0.9, static_cast<double>(i))));
}
