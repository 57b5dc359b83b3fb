#ifndef GFQC_FIELD_HPP
#define GFQC_FIELD_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace gfqc {

/// Element of GF(2^p), stored as its p-bit representation. Valid values are
/// in [0, q) with q = 2^p.
using Symbol = std::uint16_t;

/// GF(2^p) arithmetic context: a fixed primitive polynomial per degree plus
/// the exp/log tables it generates. Addition is XOR of bit patterns;
/// multiplication goes through the discrete-log tables.
struct FieldTables {
    int p = 0;
    int q = 0;
    std::uint16_t primitive_poly = 0;
    std::vector<Symbol> exp_table;  ///< size 2*(q-1); doubled so mul skips the mod
    std::vector<Symbol> log_table;  ///< size q; log_table[0] is unused

    static Symbol add(Symbol a, Symbol b) { return static_cast<Symbol>(a ^ b); }

    Symbol mul(Symbol a, Symbol b) const {
        if (a == 0 || b == 0) return 0;
        return exp_table[static_cast<std::size_t>(log_table[a]) + log_table[b]];
    }

    Symbol inv(Symbol a) const;
    Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }
};

/// The fixed primitive polynomial for degree p (bitmask including the x^p
/// term). Throws std::invalid_argument outside 1 <= p <= 8.
std::uint16_t primitive_polynomial(int p);

/// Builds the exp/log tables for GF(2^p), 1 <= p <= 8.
FieldTables build_field_tables(int p);

/// In-place Walsh-Hadamard transform over the additive group (Z/2)^p:
/// out[s] = sum_a (-1)^popcount(s & a) * v[a]. Unnormalized; applying it
/// twice multiplies by q. Length must be a power of two.
void wht_in_place(std::span<double> v);

/// Same, validating v.size() == q of the given field.
void wht_in_place(std::span<double> v, const FieldTables& tables);

/// Running count of WHT butterfly operations on this thread (q*p per call);
/// used to pin the transform's cost in tests.
std::uint64_t wht_op_count();
void reset_wht_op_count();

/// out[h*a] = in[a] for all a: converts a belief over c into a belief over
/// h*c. Requires h != 0 (throws std::domain_error).
void permute_by_coefficient(std::span<const double> in, Symbol h,
                            const FieldTables& tables, std::span<double> out);
std::vector<double> permute_by_coefficient(const std::vector<double>& in, Symbol h,
                                           const FieldTables& tables);

/// Scales v so it sums to one. An all-zero (or fully underflowed) vector is
/// replaced by the uniform vector; returns false in that case.
bool normalize(std::span<double> v);

}  // namespace gfqc

#endif
