#include "condens/special.hpp"

#include <cmath>

#include "condens/error.hpp"

namespace condens {

double digamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("digamma: argument must be positive and finite");

    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // B_2k / (2k) for k = 1..7.
    constexpr double c1 = 1.0 / 12.0;
    constexpr double c2 = -1.0 / 120.0;
    constexpr double c3 = 1.0 / 252.0;
    constexpr double c4 = -1.0 / 240.0;
    constexpr double c5 = 1.0 / 132.0;
    constexpr double c6 = -691.0 / 32760.0;
    constexpr double c7 = 1.0 / 12.0;
    const double inv2 = 1.0 / (x * x);
    const double tail =
        inv2 * (c1 + inv2 * (c2 + inv2 * (c3 + inv2 * (c4 + inv2 * (c5 + inv2 * (c6 + inv2 * c7))))));
    return shift + std::log(x) - 0.5 / x - tail;
}

double log_rising(double a, int h)
{
    if (h <= 8) {
        double prod = 1.0;
        for (int i = 0; i < h; ++i)
            prod *= a + i;
        return std::log(prod);
    }
    return std::lgamma(a + h) - std::lgamma(a);
}

} // namespace condens
