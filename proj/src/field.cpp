#include "gfqc/field.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace gfqc {

namespace {

thread_local std::uint64_t t_wht_ops = 0;

// One fixed primitive polynomial per extension degree; these are recorded in
// the stream header, so changing them is a format break.
constexpr std::array<std::uint16_t, 9> kPrimitivePoly = {
    0,            // p = 0 (unused)
    0b11,         // x + 1
    0b111,        // x^2 + x + 1
    0b1011,       // x^3 + x + 1
    0b10011,      // x^4 + x + 1
    0b100101,     // x^5 + x^2 + 1
    0b1000011,    // x^6 + x + 1
    0b10000011,   // x^7 + x + 1
    0b100011101,  // x^8 + x^4 + x^3 + x^2 + 1
};

}  // namespace

std::uint16_t primitive_polynomial(int p) {
    if (p < 1 || p > 8)
        throw std::invalid_argument("field degree p must be in [1,8], got " + std::to_string(p));
    return kPrimitivePoly[static_cast<std::size_t>(p)];
}

FieldTables build_field_tables(int p) {
    FieldTables t;
    t.p = p;
    t.primitive_poly = primitive_polynomial(p);
    t.q = 1 << p;
    const int q = t.q;
    t.exp_table.assign(2 * static_cast<std::size_t>(q - 1), 0);
    t.log_table.assign(static_cast<std::size_t>(q), 0);

    std::uint32_t x = 1;
    for (int i = 0; i < q - 1; ++i) {
        t.exp_table[static_cast<std::size_t>(i)] = static_cast<Symbol>(x);
        t.log_table[x] = static_cast<Symbol>(i);
        x <<= 1;
        if (x & static_cast<std::uint32_t>(q)) x ^= t.primitive_poly;
    }
    // second copy lets mul() index exp[log a + log b] without a modulo
    for (int i = 0; i < q - 1; ++i)
        t.exp_table[static_cast<std::size_t>(q - 1 + i)] = t.exp_table[static_cast<std::size_t>(i)];
    return t;
}

Symbol FieldTables::inv(Symbol a) const {
    if (a == 0) throw std::domain_error("gf_inv(0) is undefined");
    const int e = (q - 1) - log_table[a];
    return exp_table[static_cast<std::size_t>(e == q - 1 ? 0 : e)];
}

void wht_in_place(std::span<double> v) {
    const std::size_t n = v.size();
    std::uint64_t ops = 0;
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double u = v[j];
                const double w = v[j + h];
                v[j] = u + w;
                v[j + h] = u - w;
                ops += 2;
            }
        }
    }
    t_wht_ops += ops;
}

void wht_in_place(std::span<double> v, const FieldTables& tables) {
    if (v.size() != static_cast<std::size_t>(tables.q))
        throw std::invalid_argument("transform length must equal the field size q");
    wht_in_place(v);
}

std::uint64_t wht_op_count() { return t_wht_ops; }
void reset_wht_op_count() { t_wht_ops = 0; }

void permute_by_coefficient(std::span<const double> in, Symbol h,
                            const FieldTables& tables, std::span<double> out) {
    if (h == 0) throw std::domain_error("coefficient permutation requires h != 0");
    const std::size_t q = static_cast<std::size_t>(tables.q);
    if (in.size() != q || out.size() != q)
        throw std::invalid_argument("vector length must equal the field size q");
    for (std::size_t a = 0; a < q; ++a)
        out[tables.mul(h, static_cast<Symbol>(a))] = in[a];
}

std::vector<double> permute_by_coefficient(const std::vector<double>& in, Symbol h,
                                           const FieldTables& tables) {
    std::vector<double> out(in.size());
    permute_by_coefficient(std::span<const double>(in), h, tables, std::span<double>(out));
    return out;
}

bool normalize(std::span<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (!(sum > 0.0)) {
        const double u = 1.0 / static_cast<double>(v.size());
        for (double& x : v) x = u;
        return false;
    }
    const double inv_sum = 1.0 / sum;
    for (double& x : v) x *= inv_sum;
    return true;
}

}  // namespace gfqc
