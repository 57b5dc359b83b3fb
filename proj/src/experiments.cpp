#include "gfqc/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "gfqc/rng.hpp"

namespace gfqc {

TunedParams tuned_params_q256(double rate) {
    // (rate, L, gamma0), tuned for GF(256)
    static constexpr std::array<std::array<double, 3>, 9> kTable{{
        {0.1, 1.1, 0.98},
        {0.2, 1.3, 0.96},
        {0.3, 1.5, 0.94},
        {0.4, 1.7, 0.92},
        {0.5, 1.9, 0.92},
        {0.6, 2.3, 0.90},
        {0.7, 2.4, 0.90},
        {0.8, 2.8, 0.88},
        {0.9, 3.8, 0.88},
    }};
    const auto* best = &kTable[0];
    for (const auto& row : kTable)
        if (std::abs(row[0] - rate) < std::abs((*best)[0] - rate)) best = &row;
    return {(*best)[1], (*best)[2]};
}

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        // a:b:step expands to an inclusive grid
        const auto c1 = item.find(':');
        if (c1 != std::string::npos) {
            const auto c2 = item.find(':', c1 + 1);
            if (c2 == std::string::npos) throw std::runtime_error("bad grid range: " + item);
            const double lo = std::stod(item.substr(0, c1));
            const double hi = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
            const double step = std::stod(item.substr(c2 + 1));
            if (!(step > 0.0)) throw std::runtime_error("grid step must be positive: " + item);
            for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(x);
        } else if (!item.empty()) {
            out.push_back(std::stod(item));
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

}  // namespace

SweepConfig parse_config(std::istream& is) {
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend + 1);
        const auto vstart = val.find_first_not_of(" \t");
        val = vstart == std::string::npos ? "" : val.substr(vstart);

        if (key == "p") cfg.p = std::stoi(val);
        else if (key == "n_bits") cfg.n_bits = static_cast<std::uint32_t>(std::stoul(val));
        else if (key == "rate") cfg.rate = std::stod(val);
        else if (key == "b") cfg.b = std::stoi(val);
        else if (key == "code_seed") cfg.code_seed = std::stoull(val);
        else if (key == "L") cfg.L = std::stod(val);
        else if (key == "gamma0") cfg.gamma0 = std::stod(val);
        else if (key == "gamma1") cfg.gamma1 = std::stod(val);
        else if (key == "ell_max") cfg.ell_max = std::stoi(val);
        else if (key == "t_max") cfg.t_max = std::stoi(val);
        else if (key == "epsilon") cfg.epsilon = std::stod(val);
        else if (key == "gamma0_grid") cfg.gamma0_grid = parse_double_list(val);
        else if (key == "rate_grid") cfg.rate_grid = parse_double_list(val);
        else if (key == "b_grid") cfg.b_grid = parse_int_list(val);
        else if (key == "L_grid") cfg.L_grid = parse_double_list(val);
        else if (key == "L_per_rate") cfg.L_per_rate = parse_double_list(val);
        else if (key == "gamma0_per_rate") cfg.gamma0_per_rate = parse_double_list(val);
        else if (key == "samples") cfg.samples = std::stoi(val);
        else if (key == "master_seed") cfg.master_seed = std::stoull(val);
        else if (key == "jobs") cfg.jobs = std::stoi(val);
        else if (key == "out") cfg.out = val;
        else throw std::runtime_error("unknown config key: " + key);
    }
    if (cfg.p < 1 || cfg.p > 8) throw std::runtime_error("config: p out of range");
    if (cfg.samples < 1) throw std::runtime_error("config: samples must be >= 1");
    if (cfg.jobs < 1) throw std::runtime_error("config: jobs must be >= 1");
    return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(is);
}

SampleRecord run_encode_sample(const SparseCode& code, const PeelOrder& order,
                               const FieldTables& tables, std::uint32_t n_bits, double L,
                               const RbpParams& rbp, std::uint64_t source_seed) {
    Rng rng(source_seed);
    SourceBlock src;
    src.bits.resize(n_bits);
    for (auto& bit : src.bits) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);

    SampleRecord rec;
    if (order.core_empty()) {
        EncodeParams params;
        params.L = L;
        params.rbp = rbp;
        const EncodeOutcome out = encode(src, code, order, tables, params);
        rec.distortion = out.achieved_distortion;
        rec.iterations = out.iterations;
        rec.trials = out.trials;
        rec.fallback = out.fallback;
    } else {
        // complete core (b = 0): no payload extraction, but the codeword
        // search itself is still the measured quantity
        const auto [symbols, pad] = bits_to_symbols(src.bits, code.p);
        const Prior prior = build_prior(symbols, L, tables);
        const Propagator prop(code, tables);
        const RbpResult res = prop.run_rbp(prior, rbp);
        rec.iterations = res.iterations;
        rec.trials = res.trials;
        if (res.status == RunStatus::Converged) {
            auto bits = symbols_to_bits(res.codeword, code.p);
            bits.resize(src.bits.size());
            rec.distortion = distortion(src.bits, bits);
        } else {
            rec.fallback = true;
        }
    }
    return rec;
}

namespace {

struct GridPoint {
    SparseCode code;
    PeelOrder order;
    double grid_value = 0.0;
    double L = 0.0;
    double gamma0 = 0.0;
};

SweepOutput run_grid(const SweepConfig& cfg, const std::string& sweep_name,
                     std::vector<GridPoint> points) {
    SweepOutput out;
    const FieldTables tables = build_field_tables(cfg.p);

    for (std::size_t gi = 0; gi < points.size(); ++gi) {
        const GridPoint& pt = points[gi];
        const std::uint32_t n_bits = std::min<std::uint32_t>(
            cfg.n_bits, pt.code.n_sym * static_cast<std::uint32_t>(cfg.p));

        std::vector<SampleRecord> records(static_cast<std::size_t>(cfg.samples));
        auto worker = [&](int begin, int end) {
            for (int s = begin; s < end; ++s) {
                RbpParams rbp;
                rbp.gamma0 = pt.gamma0;
                rbp.gamma1 = cfg.gamma1;
                rbp.ell_max = cfg.ell_max;
                rbp.t_max = cfg.t_max;
                rbp.epsilon = cfg.epsilon;
                const std::uint64_t tag =
                    (static_cast<std::uint64_t>(gi) << 32) | (static_cast<std::uint64_t>(s) << 1);
                rbp.schedule_seed = derive_seed(cfg.master_seed, tag);
                const std::uint64_t source_seed = derive_seed(cfg.master_seed, tag | 1u);
                SampleRecord rec = run_encode_sample(pt.code, pt.order, tables, n_bits, pt.L,
                                                     rbp, source_seed);
                rec.grid_index = static_cast<int>(gi);
                rec.sample_index = s;
                records[static_cast<std::size_t>(s)] = rec;
            }
        };
        if (cfg.jobs <= 1) {
            worker(0, cfg.samples);
        } else {
            std::vector<std::thread> threads;
            const int chunk = (cfg.samples + cfg.jobs - 1) / cfg.jobs;
            for (int j = 0; j < cfg.jobs; ++j) {
                const int begin = j * chunk;
                const int end = std::min(cfg.samples, begin + chunk);
                if (begin < end) threads.emplace_back(worker, begin, end);
            }
            for (auto& t : threads) t.join();
        }

        SweepRow row;
        row.sweep = sweep_name;
        row.grid_value = pt.grid_value;
        row.p = cfg.p;
        row.n_sym = pt.code.n_sym;
        row.m_sym = pt.code.m_sym;
        row.b = pt.code.b;
        row.code_seed = pt.code.seed;
        row.rate_nominal = pt.code.nominal_rate();
        row.rate_effective = pt.code.rate();
        row.L = pt.L;
        row.gamma0 = pt.gamma0;
        row.gamma1 = cfg.gamma1;
        row.ell_max = cfg.ell_max;
        row.t_max = cfg.t_max;
        row.samples = cfg.samples;
        row.shannon_distortion = rd_distortion(row.rate_nominal);

        int ok = 0, failed = 0;
        double sum_d = 0.0, sum_it = 0.0, sum_tr = 0.0;
        for (const auto& rec : records) {
            sum_it += rec.iterations;
            sum_tr += rec.trials;
            if (rec.fallback) {
                ++failed;
            } else {
                ++ok;
                sum_d += rec.distortion;
            }
        }
        row.mean_distortion = ok > 0 ? sum_d / ok : 0.0;
        row.mean_iterations = sum_it / cfg.samples;
        row.mean_trials = sum_tr / cfg.samples;
        row.iterations_per_trial = sum_tr > 0.0 ? sum_it / sum_tr : 0.0;
        row.failure_rate = static_cast<double>(failed) / cfg.samples;
        out.rows.push_back(std::move(row));
        out.raw.insert(out.raw.end(), records.begin(), records.end());
    }
    return out;
}

GridPoint make_point(const SweepConfig& cfg, std::uint32_t n_sym, double rate, int b,
                     std::uint64_t code_seed, double grid_value, double L, double gamma0) {
    GridPoint pt;
    const auto m = static_cast<std::uint32_t>(
        std::llround(static_cast<double>(n_sym) * (1.0 - rate)));
    pt.code = make_code(cfg.p, n_sym, m, b, code_seed);
    pt.order = leaf_removal(pt.code);
    pt.grid_value = grid_value;
    pt.L = L;
    pt.gamma0 = gamma0;
    return pt;
}

}  // namespace

SweepOutput gamma_sweep(const SweepConfig& cfg) {
    if (cfg.gamma0_grid.empty()) throw std::runtime_error("gamma sweep needs gamma0_grid");
    std::vector<GridPoint> points;
    for (double g0 : cfg.gamma0_grid)
        points.push_back(make_point(cfg, cfg.n_sym(), cfg.rate, cfg.b, cfg.code_seed, g0,
                                    cfg.L, g0));
    return run_grid(cfg, "gamma0", std::move(points));
}

SweepOutput rate_sweep(const SweepConfig& cfg) {
    if (cfg.rate_grid.empty()) throw std::runtime_error("rate sweep needs rate_grid");
    if (!cfg.L_per_rate.empty() && cfg.L_per_rate.size() != cfg.rate_grid.size())
        throw std::runtime_error("L_per_rate must align with rate_grid");
    if (!cfg.gamma0_per_rate.empty() && cfg.gamma0_per_rate.size() != cfg.rate_grid.size())
        throw std::runtime_error("gamma0_per_rate must align with rate_grid");
    std::vector<GridPoint> points;
    for (std::size_t i = 0; i < cfg.rate_grid.size(); ++i) {
        const double rate = cfg.rate_grid[i];
        double L = cfg.L;
        double g0 = cfg.gamma0;
        if (!cfg.L_per_rate.empty()) {
            L = cfg.L_per_rate[i];
        } else if (cfg.p == 8) {
            L = tuned_params_q256(rate).L;
        }
        if (!cfg.gamma0_per_rate.empty()) {
            g0 = cfg.gamma0_per_rate[i];
        } else if (cfg.p == 8) {
            g0 = tuned_params_q256(rate).gamma0;
        }
        points.push_back(make_point(cfg, cfg.n_sym(), rate, cfg.b,
                                    derive_seed(cfg.code_seed, i), rate, L, g0));
    }
    return run_grid(cfg, "rate", std::move(points));
}

SweepOutput b_sweep(const SweepConfig& cfg) {
    if (cfg.b_grid.empty()) throw std::runtime_error("b sweep needs b_grid");
    std::vector<GridPoint> points;
    for (int b : cfg.b_grid)
        points.push_back(make_point(cfg, cfg.n_sym(), cfg.rate, b, cfg.code_seed,
                                    static_cast<double>(b), cfg.L, cfg.gamma0));
    return run_grid(cfg, "b", std::move(points));
}

SweepOutput benchmark(const SweepConfig& cfg) {
    std::vector<GridPoint> points;
    points.push_back(make_point(cfg, cfg.n_sym(), cfg.rate, cfg.b, cfg.code_seed, cfg.gamma0,
                                cfg.L, cfg.gamma0));
    return run_grid(cfg, "benchmark", std::move(points));
}

std::vector<WefRow> wef_curve(const SweepConfig& cfg) {
    if (cfg.L_grid.empty()) throw std::runtime_error("wef sweep needs L_grid");
    const FieldTables tables = build_field_tables(cfg.p);
    const auto m = static_cast<std::uint32_t>(
        std::llround(static_cast<double>(cfg.n_sym()) * (1.0 - cfg.rate)));
    const SparseCode code = make_code(cfg.p, cfg.n_sym(), m, cfg.b, cfg.code_seed);

    // reference word: fresh Bernoulli(1/2) bits, the source model itself
    Rng rng(derive_seed(cfg.master_seed, 0xeefull));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(code.n_sym) * cfg.p);
    for (auto& bit : bits) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    const auto [reference, pad] = bits_to_symbols(bits, cfg.p);

    BpParams bp;
    bp.ell_max = cfg.ell_max;
    bp.epsilon = cfg.epsilon;
    bp.damping = 0.5;
    bp.schedule_seed = derive_seed(cfg.master_seed, 1);

    const auto points = wef_sweep(code, tables, cfg.L_grid, reference, bp);
    const double rate_eff = code.rate();
    std::vector<WefRow> rows;
    rows.reserve(points.size());
    for (const auto& pt : points) {
        WefRow row;
        row.L = pt.L;
        row.avg_distance = pt.avg_distance;
        row.entropy_density = pt.entropy_density;
        const double d = std::clamp(pt.avg_distance, 1e-9, 1.0 - 1e-9);
        row.shannon_entropy_density = rate_eff - (1.0 - binary_entropy(d));
        row.converged = pt.converged;
        row.sweeps = pt.sweeps;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::ostream& csv_stream(std::ostream& os) {
    os << std::setprecision(12);
    return os;
}

}  // namespace

void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    csv_stream(os) << "sweep,grid_value,p,n_sym,m_sym,b,code_seed,rate_nominal,rate_effective,"
                      "L,gamma0,gamma1,ell_max,t_max,samples,shannon_D,mean_distortion,"
                      "mean_iterations,mean_trials,iterations_per_trial,failure_rate\n";
    for (const auto& r : rows) {
        os << r.sweep << ',' << r.grid_value << ',' << r.p << ',' << r.n_sym << ',' << r.m_sym
           << ',' << r.b << ',' << r.code_seed << ',' << r.rate_nominal << ','
           << r.rate_effective << ',' << r.L << ',' << r.gamma0 << ',' << r.gamma1 << ','
           << r.ell_max << ',' << r.t_max << ',' << r.samples << ',' << r.shannon_distortion
           << ',' << r.mean_distortion << ',' << r.mean_iterations << ',' << r.mean_trials
           << ',' << r.iterations_per_trial << ',' << r.failure_rate << '\n';
    }
}

void write_samples_csv(const std::vector<SampleRecord>& raw, std::ostream& os) {
    csv_stream(os) << "grid_index,sample,distortion,iterations,trials,fallback\n";
    for (const auto& r : raw)
        os << r.grid_index << ',' << r.sample_index << ',' << r.distortion << ','
           << r.iterations << ',' << r.trials << ',' << (r.fallback ? 1 : 0) << '\n';
}

void write_wef_csv(const std::vector<WefRow>& rows, std::ostream& os) {
    csv_stream(os) << "L,avg_distance,entropy_density,shannon_entropy_density,converged,sweeps\n";
    for (const auto& r : rows)
        os << r.L << ',' << r.avg_distance << ',' << r.entropy_density << ','
           << r.shannon_entropy_density << ',' << (r.converged ? 1 : 0) << ',' << r.sweeps
           << '\n';
}

void write_rows_json(const std::vector<SweepRow>& rows, std::ostream& os) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"sweep", r.sweep},
                       {"grid_value", r.grid_value},
                       {"p", r.p},
                       {"n_sym", r.n_sym},
                       {"m_sym", r.m_sym},
                       {"b", r.b},
                       {"code_seed", r.code_seed},
                       {"rate_nominal", r.rate_nominal},
                       {"rate_effective", r.rate_effective},
                       {"L", r.L},
                       {"gamma0", r.gamma0},
                       {"gamma1", r.gamma1},
                       {"ell_max", r.ell_max},
                       {"t_max", r.t_max},
                       {"samples", r.samples},
                       {"shannon_D", r.shannon_distortion},
                       {"mean_distortion", r.mean_distortion},
                       {"mean_iterations", r.mean_iterations},
                       {"mean_trials", r.mean_trials},
                       {"iterations_per_trial", r.iterations_per_trial},
                       {"failure_rate", r.failure_rate}});
    }
    os << arr.dump(2) << '\n';
}

void write_samples_json(const std::vector<SampleRecord>& raw, std::ostream& os) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : raw)
        arr.push_back({{"grid_index", r.grid_index},
                       {"sample", r.sample_index},
                       {"distortion", r.distortion},
                       {"iterations", r.iterations},
                       {"trials", r.trials},
                       {"fallback", r.fallback}});
    os << arr.dump(2) << '\n';
}

void write_wef_json(const std::vector<WefRow>& rows, std::ostream& os) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"L", r.L},
                       {"avg_distance", r.avg_distance},
                       {"entropy_density", r.entropy_density},
                       {"shannon_entropy_density", r.shannon_entropy_density},
                       {"converged", r.converged},
                       {"sweeps", r.sweeps}});
    os << arr.dump(2) << '\n';
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

}  // namespace

void write_sweep_files(const SweepOutput& out, const std::string& stem) {
    {
        auto os = open_out(stem + ".csv");
        write_rows_csv(out.rows, os);
    }
    {
        auto os = open_out(stem + ".json");
        write_rows_json(out.rows, os);
    }
    {
        auto os = open_out(stem + ".samples.csv");
        write_samples_csv(out.raw, os);
    }
    {
        auto os = open_out(stem + ".samples.json");
        write_samples_json(out.raw, os);
    }
}

void write_wef_files(const std::vector<WefRow>& rows, const std::string& stem) {
    {
        auto os = open_out(stem + ".csv");
        write_wef_csv(rows, os);
    }
    {
        auto os = open_out(stem + ".json");
        write_wef_json(rows, os);
    }
}

}  // namespace gfqc
