#ifndef FSPEC_QUADRATURE_HPP
#define FSPEC_QUADRATURE_HPP

#include "fspec/measure.hpp"

#include <cstdint>

namespace fspec {

struct QuadratureOptions {
    /// Refinement stops once two successive levels agree to this relative tolerance.
    double rel_tol = 1e-3;
    int max_refinements = 8;
    /// Maximum number of Fourier evaluations for a single region and level.
    std::uint64_t node_budget = 200'000'000;
};

struct RegionIntegral {
    int index = 0;  // shell index, or kCoreRegion for the unit ball
    double value = 0.0;
    bool converged = false;
    int refinements = 0;
    std::uint64_t nodes = 0;  // evaluations at the accepted level
};

/// Integral of |mu^(z)|^modulus_power |z|^radius_power over the dyadic annulus
/// 2^j <= |z| < 2^{j+1}, or over the unit ball when j == kCoreRegion (which
/// needs radius_power + d > 0; the radial singularity is removed by the
/// substitution r = u^{1/(radius_power + d)}).
///
/// Polar coordinates with composite 8-point Gauss-Legendre panels in r and,
/// when |mu^| is not radial, a trapezoid rule in angle (d = 2) or a
/// Gauss-Legendre x trapezoid grid on the sphere (d = 3). Each refinement halves
/// the panel width and doubles the angular resolution. Only d <= 3 is supported.
RegionIntegral integrate_region(const MeasureSpec& spec, int j, double modulus_power, double radius_power,
                                const QuadratureOptions& options = {});

} // namespace fspec

#endif
