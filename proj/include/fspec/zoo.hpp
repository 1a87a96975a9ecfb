#ifndef FSPEC_ZOO_HPP
#define FSPEC_ZOO_HPP

#include "fspec/config.hpp"

#include <vector>

namespace fspec {

/// The five-member default zoo (also shipped as data/default_zoo.json):
/// a Dirac mass, Lebesgue on [1/4, 3/4], the Cantor measure mapped onto
/// [1/4, 3/4], the circle of radius 1/4 centred in the unit square, and the
/// convolution of a scaled Cantor measure with Lebesgue on [0, 1/5].
std::vector<ZooMember> default_zoo();

/// Lattice scale at which the integer-lattice formula applies to spec:
/// 1 when the support sits inside some [delta, 1-delta]^d, otherwise
/// 1 / (2 R) for support diameter R.
double natural_alpha(const MeasureSpec& spec);

} // namespace fspec

#endif
