// gfqc: lossy compressor for binary symmetric sources built on reduced
// ultra-sparse GF(2^p) parity-check codes, plus the experiment harness
// around it (rate/gamma0/b sweeps and weight-enumerator estimation).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gfqc/analysis.hpp"
#include "gfqc/codec.hpp"
#include "gfqc/experiments.hpp"
#include "gfqc/rng.hpp"

namespace {

using namespace gfqc;

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open input file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

int diagnostics_level() {
    const char* env = std::getenv("GFQC_LOG");
    if (!env || !*env) return 0;
    return std::max(1, std::atoi(env));
}

struct CodeFlags {
    int p = 6;
    std::uint32_t n_bits = 1600;
    double rate = 0.33;
    int b = 5;
    std::uint64_t seed = 1;
    std::string code_file;

    void add_to(CLI::App* cmd, bool with_file = true) {
        cmd->add_option("--p", p, "field extension degree, q = 2^p")->check(CLI::Range(1, 8));
        cmd->add_option("--nbits", n_bits, "source block length in binary digits");
        cmd->add_option("--rate", rate, "nominal code rate in (0,1)");
        cmd->add_option("--b", b, "number of parity checks removed by reduction");
        cmd->add_option("--seed", seed, "construction seed");
        if (with_file)
            cmd->add_option("--code", code_file, "read the code from a file instead of building it");
    }

    std::uint32_t n_sym() const {
        return (n_bits + static_cast<std::uint32_t>(p) - 1) / static_cast<std::uint32_t>(p);
    }

    SparseCode resolve() const {
        if (!code_file.empty()) return read_code_file(code_file);
        const auto m = static_cast<std::uint32_t>(
            std::llround(static_cast<double>(n_sym()) * (1.0 - rate)));
        return make_code(p, n_sym(), m, b, seed);
    }
};

struct RunFlags {
    double L = 1.5;
    double gamma0 = 0.92;
    double gamma1 = 1.0;
    int ell_max = 300;
    int t_max = 5;
    double epsilon = 1e-6;
    std::uint64_t schedule_seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--L", L, "prior strength");
        cmd->add_option("--gamma0", gamma0, "reinforcement constant gamma0")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--gamma1", gamma1, "reinforcement decay gamma1")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--ell-max", ell_max, "iteration cap per trial");
        cmd->add_option("--t-max", t_max, "restart cap");
        cmd->add_option("--epsilon", epsilon, "message stability threshold");
        cmd->add_option("--schedule-seed", schedule_seed, "scheduling seed");
    }

    RbpParams rbp() const {
        RbpParams p;
        p.gamma0 = gamma0;
        p.gamma1 = gamma1;
        p.ell_max = ell_max;
        p.t_max = t_max;
        p.epsilon = epsilon;
        p.schedule_seed = schedule_seed;
        return p;
    }
};

int cmd_gen_code(const CodeFlags& flags, const std::string& out_path) {
    const SparseCode code = flags.resolve();
    if (!out_path.empty()) write_code_file(code, out_path);
    const PeelOrder order = leaf_removal(code);

    std::cout << "n_sym=" << code.n_sym << " m_sym=" << code.m_sym << " b=" << code.b
              << " seed=" << code.seed << " p=" << code.p << '\n';
    std::cout << "n_bits=" << code.n_sym * static_cast<std::uint32_t>(code.p)
              << " rate_nominal=" << code.nominal_rate() << " rate_effective=" << code.rate()
              << '\n';
    std::cout << "check_degrees:";
    for (auto [deg, count] : code.check_degree_histogram())
        std::cout << ' ' << deg << 'x' << count;
    std::cout << '\n';
    std::cout << "core_size=" << order.core_size() << " info_symbols=" << order.info_set.size()
              << '\n';
    if (!out_path.empty()) std::cout << "wrote " << out_path << '\n';
    return 0;
}

int cmd_gen_source(std::uint32_t n_bits, std::uint64_t seed, const std::string& out_path) {
    if (n_bits % 8 != 0)
        throw std::runtime_error("--nbits must be a multiple of 8 for file output");
    Rng rng(seed);
    std::vector<std::uint8_t> bits(n_bits);
    for (auto& bit : bits) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    write_file_bytes(out_path, pack_bits(bits));
    std::cout << "wrote " << out_path << " (" << n_bits << " bits)\n";
    return 0;
}

int cmd_compress(const CodeFlags& cflags, const RunFlags& rflags, const std::string& in_path,
                 const std::string& out_path, bool embed, bool as_json) {
    SparseCode code = cflags.resolve();
    bool must_embed = embed;
    if (!cflags.code_file.empty()) {
        // codes from files are only tuple-addressable if the tuple actually
        // regenerates them
        const SparseCode regen =
            make_code(code.p, code.n_sym, code.m_sym + code.b, code.b, code.seed);
        if (!(regen == code)) must_embed = true;
    }
    const PeelOrder order = leaf_removal(code);
    const FieldTables tables = build_field_tables(code.p);

    const auto bytes = read_file_bytes(in_path);
    SourceBlock src;
    src.bits = unpack_bits(bytes, bytes.size() * 8);

    EncodeParams params;
    params.L = rflags.L;
    params.rbp = rflags.rbp();
    params.embed_code = must_embed;

    if (diagnostics_level() >= 1) {
        std::cerr << "trial,sweep,gamma,max_delta,unsat_checks,entropy_proxy\n";
        const Prior prior =
            build_prior(bits_to_symbols(src.bits, code.p).first, params.L, tables);
        const Propagator prop(code, tables);
        prop.run_rbp(prior, params.rbp, [](const SweepDiagnostics& d) {
            std::cerr << d.trial << ',' << d.sweep << ',' << d.gamma << ',' << d.max_delta << ','
                      << d.unsat_checks << ',' << d.entropy_proxy << '\n';
        });
    }
    const EncodeOutcome out = encode(src, code, order, tables, params);
    write_file_bytes(out_path, out.block.serialize());

    if (as_json) {
        nlohmann::json j{{"n_bits", src.bits.size()},
                         {"rate", out.block.rate()},
                         {"distortion", out.achieved_distortion},
                         {"iterations", out.iterations},
                         {"trials", out.trials},
                         {"fallback", out.fallback},
                         {"bound_distortion", rd_distortion(code.nominal_rate())}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "n_bits=" << src.bits.size() << " rate=" << out.block.rate()
                  << " distortion=" << out.achieved_distortion
                  << " iterations=" << out.iterations << " trials=" << out.trials
                  << " fallback=" << (out.fallback ? 1 : 0) << '\n';
    }
    return out.fallback ? 2 : 0;
}

int cmd_decompress(const std::string& in_path, const std::string& out_path,
                   const std::string& code_file, bool as_json) {
    const auto bytes = read_file_bytes(in_path);
    const CompressedBlock block = CompressedBlock::deserialize(bytes);
    const SparseCode code =
        code_file.empty() ? code_for_block(block) : read_code_file(code_file);
    const FieldTables tables = build_field_tables(code.p);
    const PeelOrder order = leaf_removal(code);
    const ReconstructedBlock rec = decode(block, code, order, tables);
    write_file_bytes(out_path, pack_bits(rec.bits));
    if (as_json) {
        nlohmann::json j{{"n_bits", rec.bits.size()}, {"fallback", block.fallback()}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "n_bits=" << rec.bits.size() << " fallback=" << (block.fallback() ? 1 : 0)
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lossy compression with reduced ultra-sparse GF(q) codes"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-code", "construct a code and write it to a file");
    CodeFlags gen_flags;
    gen_flags.add_to(gen, /*with_file=*/false);
    std::string gen_out;
    gen->add_option("--out", gen_out, "code file path");

    auto* gsrc = app.add_subcommand("gen-source", "write a Bernoulli(1/2) source file");
    std::uint32_t gsrc_bits = 1600;
    std::uint64_t gsrc_seed = 1;
    std::string gsrc_out;
    gsrc->add_option("--nbits", gsrc_bits, "source length in bits (multiple of 8)");
    gsrc->add_option("--seed", gsrc_seed, "source seed");
    gsrc->add_option("--out", gsrc_out, "output path")->required();

    auto* comp = app.add_subcommand("compress", "compress a bit file");
    CodeFlags comp_code;
    RunFlags comp_run;
    comp_code.add_to(comp);
    comp_run.add_to(comp);
    std::string comp_in, comp_out;
    bool comp_embed = false, comp_json = false;
    comp->add_option("--input", comp_in, "source file")->required();
    comp->add_option("--out", comp_out, "compressed output file")->required();
    comp->add_flag("--embed-code", comp_embed, "embed the parity-check matrix in the stream");
    comp->add_flag("--json", comp_json, "print the summary as JSON");

    auto* dec = app.add_subcommand("decompress", "reconstruct a bit file");
    std::string dec_in, dec_out, dec_code;
    bool dec_json = false;
    dec->add_option("--input", dec_in, "compressed file")->required();
    dec->add_option("--out", dec_out, "reconstructed output file")->required();
    dec->add_option("--code", dec_code, "code file (default: regenerate from the header)");
    dec->add_flag("--json", dec_json, "print the summary as JSON");

    auto add_sweep_common = [](CLI::App* cmd, CodeFlags& cf, RunFlags& rf, std::string& config,
                               int& samples, std::uint64_t& master_seed, int& jobs,
                               std::string& out) {
        cf.add_to(cmd, /*with_file=*/false);
        rf.add_to(cmd);
        cmd->add_option("--config", config, "key=value experiment config file");
        cmd->add_option("--samples", samples, "samples per grid point");
        cmd->add_option("--master-seed", master_seed, "master seed");
        cmd->add_option("--jobs", jobs, "worker threads across samples");
        cmd->add_option("--out", out, "output stem (.csv/.json appended)");
    };

    auto* gsw = app.add_subcommand("gamma-sweep", "distortion/iterations vs gamma0");
    CodeFlags gsw_code;
    RunFlags gsw_run;
    std::string gsw_config, gsw_out = "gamma_sweep", gsw_grid;
    int gsw_samples = 50, gsw_jobs = 1;
    std::uint64_t gsw_master = 1;
    add_sweep_common(gsw, gsw_code, gsw_run, gsw_config, gsw_samples, gsw_master, gsw_jobs,
                     gsw_out);
    gsw->add_option("--gamma0-grid", gsw_grid, "comma list or lo:hi:step");

    auto* rsw = app.add_subcommand("rd-sweep", "distortion vs rate, against 1 - H(D)");
    CodeFlags rsw_code;
    RunFlags rsw_run;
    std::string rsw_config, rsw_out = "rd_sweep", rsw_rates, rsw_L, rsw_g0;
    int rsw_samples = 50, rsw_jobs = 1;
    std::uint64_t rsw_master = 1;
    add_sweep_common(rsw, rsw_code, rsw_run, rsw_config, rsw_samples, rsw_master, rsw_jobs,
                     rsw_out);
    rsw->add_option("--rates", rsw_rates, "rate grid, comma list");
    rsw->add_option("--L-per-rate", rsw_L, "prior strengths aligned with --rates");
    rsw->add_option("--gamma0-per-rate", rsw_g0, "gamma0 values aligned with --rates");

    auto* bsw = app.add_subcommand("b-sweep", "distortion vs reduction depth b");
    CodeFlags bsw_code;
    RunFlags bsw_run;
    std::string bsw_config, bsw_out = "b_sweep", bsw_grid;
    int bsw_samples = 50, bsw_jobs = 1;
    std::uint64_t bsw_master = 1;
    add_sweep_common(bsw, bsw_code, bsw_run, bsw_config, bsw_samples, bsw_master, bsw_jobs,
                     bsw_out);
    bsw->add_option("--b-grid", bsw_grid, "comma list of b values");

    auto* wef = app.add_subcommand("wef", "weight-enumerator curve from BP fixed points");
    CodeFlags wef_code;
    RunFlags wef_run;
    std::string wef_config, wef_out = "wef", wef_grid;
    int wef_samples = 1, wef_jobs = 1;
    std::uint64_t wef_master = 1;
    add_sweep_common(wef, wef_code, wef_run, wef_config, wef_samples, wef_master, wef_jobs,
                     wef_out);
    wef->add_option("--L-grid", wef_grid, "comma list or lo:hi:step of prior strengths");

    auto* bench = app.add_subcommand("bench", "distortion statistics for one configuration");
    CodeFlags bench_code;
    RunFlags bench_run;
    std::string bench_config, bench_out = "bench";
    int bench_samples = 50, bench_jobs = 1;
    std::uint64_t bench_master = 1;
    add_sweep_common(bench, bench_code, bench_run, bench_config, bench_samples, bench_master,
                     bench_jobs, bench_out);

    try {
        app.parse(argc, argv);

        auto fill_cfg = [](const std::string& config_path, const CodeFlags& cf, const RunFlags& rf,
                           int samples, std::uint64_t master_seed, int jobs,
                           const std::string& out) {
            SweepConfig cfg;
            if (!config_path.empty()) {
                cfg = parse_config_file(config_path);
            } else {
                cfg.p = cf.p;
                cfg.n_bits = cf.n_bits;
                cfg.rate = cf.rate;
                cfg.b = cf.b;
                cfg.code_seed = cf.seed;
                cfg.L = rf.L;
                cfg.gamma0 = rf.gamma0;
                cfg.gamma1 = rf.gamma1;
                cfg.ell_max = rf.ell_max;
                cfg.t_max = rf.t_max;
                cfg.epsilon = rf.epsilon;
                cfg.samples = samples;
                cfg.master_seed = master_seed;
                cfg.jobs = jobs;
            }
            if (cfg.out.empty()) cfg.out = out;
            return cfg;
        };

        if (gen->parsed()) return cmd_gen_code(gen_flags, gen_out);
        if (gsrc->parsed()) return cmd_gen_source(gsrc_bits, gsrc_seed, gsrc_out);
        if (comp->parsed())
            return cmd_compress(comp_code, comp_run, comp_in, comp_out, comp_embed, comp_json);
        if (dec->parsed()) return cmd_decompress(dec_in, dec_out, dec_code, dec_json);

        if (gsw->parsed()) {
            SweepConfig cfg = fill_cfg(gsw_config, gsw_code, gsw_run, gsw_samples, gsw_master,
                                       gsw_jobs, gsw_out);
            if (!gsw_grid.empty()) {
                std::istringstream is("gamma0_grid=" + gsw_grid);
                cfg.gamma0_grid = parse_config(is).gamma0_grid;
            }
            write_sweep_files(gamma_sweep(cfg), cfg.out);
            std::cout << "wrote " << cfg.out << ".csv and mirrors\n";
            return 0;
        }
        if (rsw->parsed()) {
            SweepConfig cfg = fill_cfg(rsw_config, rsw_code, rsw_run, rsw_samples, rsw_master,
                                       rsw_jobs, rsw_out);
            std::string patch;
            if (!rsw_rates.empty()) patch += "rate_grid=" + rsw_rates + "\n";
            if (!rsw_L.empty()) patch += "L_per_rate=" + rsw_L + "\n";
            if (!rsw_g0.empty()) patch += "gamma0_per_rate=" + rsw_g0 + "\n";
            if (!patch.empty()) {
                std::istringstream is(patch);
                const SweepConfig patched = parse_config(is);
                if (!patched.rate_grid.empty()) cfg.rate_grid = patched.rate_grid;
                if (!patched.L_per_rate.empty()) cfg.L_per_rate = patched.L_per_rate;
                if (!patched.gamma0_per_rate.empty())
                    cfg.gamma0_per_rate = patched.gamma0_per_rate;
            }
            write_sweep_files(rate_sweep(cfg), cfg.out);
            std::cout << "wrote " << cfg.out << ".csv and mirrors\n";
            return 0;
        }
        if (bsw->parsed()) {
            SweepConfig cfg = fill_cfg(bsw_config, bsw_code, bsw_run, bsw_samples, bsw_master,
                                       bsw_jobs, bsw_out);
            if (!bsw_grid.empty()) {
                std::istringstream is("b_grid=" + bsw_grid);
                cfg.b_grid = parse_config(is).b_grid;
            }
            write_sweep_files(b_sweep(cfg), cfg.out);
            std::cout << "wrote " << cfg.out << ".csv and mirrors\n";
            return 0;
        }
        if (wef->parsed()) {
            SweepConfig cfg = fill_cfg(wef_config, wef_code, wef_run, wef_samples, wef_master,
                                       wef_jobs, wef_out);
            if (!wef_grid.empty()) {
                std::istringstream is("L_grid=" + wef_grid);
                cfg.L_grid = parse_config(is).L_grid;
            }
            write_wef_files(wef_curve(cfg), cfg.out);
            std::cout << "wrote " << cfg.out << ".csv and mirrors\n";
            return 0;
        }
        if (bench->parsed()) {
            SweepConfig cfg = fill_cfg(bench_config, bench_code, bench_run, bench_samples,
                                       bench_master, bench_jobs, bench_out);
            const auto out = benchmark(cfg);
            write_sweep_files(out, cfg.out);
            const auto& row = out.rows.at(0);
            std::cout << "mean_distortion=" << row.mean_distortion
                      << " bound=" << row.shannon_distortion << " db_above_bound="
                      << db_above_bound(row.mean_distortion, row.shannon_distortion)
                      << " mean_iterations=" << row.mean_iterations
                      << " mean_trials=" << row.mean_trials
                      << " failure_rate=" << row.failure_rate << '\n';
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
