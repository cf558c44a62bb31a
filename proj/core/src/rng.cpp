#include "seqmix/rng.hpp"

#include <cmath>

namespace seqmix {

namespace {

double standard_normal(Rng& rng) {
    // Marsaglia polar method
    for (;;) {
        double u = 2.0 * uniform01(rng) - 1.0;
        double v = 2.0 * uniform01(rng) - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

}  // namespace

double sample_gamma(Rng& rng, double shape) {
    // Marsaglia-Tsang; shape < 1 handled by the boost G(a) = G(a+1) U^(1/a)
    if (shape < 1.0) {
        double g = sample_gamma(rng, shape + 1.0);
        double u = uniform01(rng);
        while (u == 0.0) u = uniform01(rng);
        return g * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = standard_normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform01(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

double sample_beta(Rng& rng, double alpha) {
    double a = sample_gamma(rng, alpha);
    double b = sample_gamma(rng, alpha);
    double s = a + b;
    if (s == 0.0) return 0.5;
    return a / s;
}

}  // namespace seqmix
