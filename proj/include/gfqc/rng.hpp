#ifndef GFQC_RNG_HPP
#define GFQC_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace gfqc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent seed stream for (base, stream). Construction, reduction,
// scheduling and sample draws each get their own stream so that adding a
// consumer never shifts another one's sequence.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
    std::uint64_t r = splitmix64(s);
    return r ^ splitmix64(s);
}

// mt19937_64 plus fixed-algorithm draws. std::uniform_int_distribution and
// std::shuffle are not bit-reproducible across standard libraries; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, n). Modulo bias is below 2^-53 for every n used here.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gfqc

#endif
