#ifndef GFQC_ANALYSIS_HPP
#define GFQC_ANALYSIS_HPP

#include <span>
#include <vector>

#include "gfqc/code.hpp"
#include "gfqc/msgpass.hpp"

namespace gfqc {

/// Binary entropy H(d) in bits; H(0) = H(1) = 0.
double binary_entropy(double d);

/// Shannon limit for a binary symmetric source under Hamming distortion:
/// rate R(D) = 1 - H(D) and its inverse D*(R), the latter by bisection on
/// [0, 1/2] to 1e-10.
double rd_rate(double distortion);
double rd_distortion(double rate);

/// Gap to the bound in dB, read as 10*log10(D / D*).
double db_above_bound(double achieved, double bound);

/// Average distance per binary digit under the current marginals:
/// sum_v sum_a g_v(a) * bits_different(a, y_v) / (n*p).
double average_distance(const MessageState& state, std::span<const Symbol> source, int p);

/// Entropy (nats) of the parity-constrained Gibbs measure at a BP fixed
/// point, via the Bethe decomposition S = sum_f S_f + sum_v (1-d_v) S_v with
/// the prior folded into the variable beliefs. Factor terms avoid the
/// q^(d-1) configuration sum: S_f = ln Z_f - sum_v sum_a b(a) ln mu_vf(a),
/// with Z_f read off the transform-domain product at symbol zero and the
/// factor marginal equal to mu_vf (x) mu_fv. Exact on trees; a loopy
/// approximation otherwise, and only meaningful at a fixed point.
double bethe_entropy(const MessageState& state, const SparseCode& code, const Prior& prior,
                     const FieldTables& tables);

struct WefPoint {
    double L = 0.0;
    double avg_distance = 0.0;     ///< D_P per binary digit
    double entropy_density = 0.0;  ///< log2 codeword count per binary digit
    bool converged = false;
    int sweeps = 0;
};

/// Sweeps the prior strength L and reads (distance, entropy density) off the
/// damped-BP fixed point for each value: the weight-enumerator curve of the
/// code around the reference word. Non-converged points are reported but
/// flagged; callers plotting curves should drop them.
std::vector<WefPoint> wef_sweep(const SparseCode& code, const FieldTables& tables,
                                std::span<const double> L_grid,
                                std::span<const Symbol> reference, const BpParams& params);

}  // namespace gfqc

#endif
