#include "adipredict/random.hpp"

#include <cmath>
#include <numbers>

namespace adipredict {

double Rng::normal()
{
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t count)
{
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    count = std::min(count, n);
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(pool[i], pool[i + index(n - i)]);
    }
    pool.resize(count);
    return pool;
}

} // namespace adipredict
