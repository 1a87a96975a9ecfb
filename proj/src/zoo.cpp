#include "fspec/zoo.hpp"

namespace fspec {

std::vector<ZooMember> default_zoo()
{
    const MeasureSpec cantor = MeasureSpec::cantor();
    std::vector<ZooMember> zoo;
    zoo.push_back({"dirac", {"atomic"}, MeasureSpec::dirac({0.5})});
    zoo.push_back({"lebesgue_quarter", {"salem"}, MeasureSpec::box_lebesgue({0.25}, {0.75})});
    zoo.push_back({"cantor_normalized", {"self-similar"}, MeasureSpec::affine(cantor, 0.5, {0.25})});
    zoo.push_back({"circle", {"salem", "radial"}, MeasureSpec::sphere_surface({0.5, 0.5}, 0.25)});
    zoo.push_back({"cantor_conv_interval",
                   {"convolution"},
                   MeasureSpec::convolve(MeasureSpec::affine(cantor, 0.25, {0.25}),
                                         MeasureSpec::box_lebesgue({0.0}, {0.2}))});
    return zoo;
}

double natural_alpha(const MeasureSpec& spec)
{
    const SupportGeometry g = support_geometry(spec);
    if (g.margin || g.diameter == 0.0)
        return 1.0;
    return 0.5 / g.diameter;
}

} // namespace fspec
