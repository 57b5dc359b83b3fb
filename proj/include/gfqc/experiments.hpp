#ifndef GFQC_EXPERIMENTS_HPP
#define GFQC_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gfqc/analysis.hpp"
#include "gfqc/codec.hpp"

namespace gfqc {

/// Tuned encoder settings per rate, found experimentally for GF(256).
struct TunedParams {
    double L = 1.5;
    double gamma0 = 0.94;
};
TunedParams tuned_params_q256(double rate);

/// One experiment campaign. Parsed from key=value config files or built by
/// the CLI; everything downstream is deterministic given master_seed.
struct SweepConfig {
    // base code
    int p = 6;
    std::uint32_t n_bits = 1600;  ///< source length in binary digits
    double rate = 0.33;
    int b = 5;
    std::uint64_t code_seed = 1;

    // encoder
    double L = 1.5;
    double gamma0 = 0.92;
    double gamma1 = 1.0;
    int ell_max = 300;
    int t_max = 5;
    double epsilon = 1e-6;

    // grids (used by the matching sweep)
    std::vector<double> gamma0_grid;
    std::vector<double> rate_grid;
    std::vector<int> b_grid;
    std::vector<double> L_grid;             ///< wef sweep
    std::vector<double> L_per_rate;         ///< aligned with rate_grid (optional)
    std::vector<double> gamma0_per_rate;    ///< aligned with rate_grid (optional)

    int samples = 50;
    std::uint64_t master_seed = 1;
    int jobs = 1;
    std::string out;

    std::uint32_t n_sym() const {
        return static_cast<std::uint32_t>((n_bits + static_cast<std::uint32_t>(p) - 1) /
                                          static_cast<std::uint32_t>(p));
    }
};

SweepConfig parse_config(std::istream& is);
SweepConfig parse_config_file(const std::string& path);

struct SampleRecord {
    int grid_index = 0;
    int sample_index = 0;
    double distortion = 0.0;
    int iterations = 0;
    int trials = 0;
    bool fallback = false;
};

/// Per-grid-point aggregate. Distortion averages successful encodings only;
/// failures show up in failure_rate instead of skewing the mean.
struct SweepRow {
    std::string sweep;      ///< gamma0 | rate | b | benchmark
    double grid_value = 0;  ///< the swept parameter's value
    int p = 0;
    std::uint32_t n_sym = 0;
    std::uint32_t m_sym = 0;
    int b = 0;
    std::uint64_t code_seed = 0;
    double rate_nominal = 0.0;
    double rate_effective = 0.0;
    double L = 0.0;
    double gamma0 = 0.0;
    double gamma1 = 1.0;
    int ell_max = 0;
    int t_max = 0;
    int samples = 0;
    double shannon_distortion = 0.0;  ///< D*(rate_nominal)
    double mean_distortion = 0.0;
    double mean_iterations = 0.0;
    double mean_trials = 0.0;
    double iterations_per_trial = 0.0;
    double failure_rate = 0.0;
};

struct SweepOutput {
    std::vector<SweepRow> rows;
    std::vector<SampleRecord> raw;
};

SweepOutput gamma_sweep(const SweepConfig& cfg);
SweepOutput rate_sweep(const SweepConfig& cfg);
SweepOutput b_sweep(const SweepConfig& cfg);

/// Single-configuration benchmark (one row).
SweepOutput benchmark(const SweepConfig& cfg);

struct WefRow {
    double L = 0.0;
    double avg_distance = 0.0;
    double entropy_density = 0.0;
    double shannon_entropy_density = 0.0;  ///< R - (1 - H(D)) at the measured D
    bool converged = false;
    int sweeps = 0;
};
std::vector<WefRow> wef_curve(const SweepConfig& cfg);

void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& os);
void write_rows_json(const std::vector<SweepRow>& rows, std::ostream& os);
void write_samples_csv(const std::vector<SampleRecord>& raw, std::ostream& os);
void write_samples_json(const std::vector<SampleRecord>& raw, std::ostream& os);
void write_wef_csv(const std::vector<WefRow>& rows, std::ostream& os);
void write_wef_json(const std::vector<WefRow>& rows, std::ostream& os);

/// Writes <stem>.csv/.json and <stem>.samples.csv/.json.
void write_sweep_files(const SweepOutput& out, const std::string& stem);
void write_wef_files(const std::vector<WefRow>& rows, const std::string& stem);

/// Encodes one fresh Bernoulli(1/2) source against the given code;
/// deterministic in (source_seed, schedule_seed).
SampleRecord run_encode_sample(const SparseCode& code, const PeelOrder& order,
                               const FieldTables& tables, std::uint32_t n_bits, double L,
                               const RbpParams& rbp, std::uint64_t source_seed);

}  // namespace gfqc

#endif
