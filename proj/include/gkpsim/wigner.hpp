#pragma once

#include <vector>

#include "gkpsim/gkp_prep.hpp"
#include "gkpsim/grid.hpp"

namespace gkpsim {

// Every phase-space map carries its normalization: integral_pi means
// Int W dx dp = pi for a unit-norm state (the doubled-argument transform
// below), unit means the same map divided by pi. Mixing the two in
// arithmetic is rejected.
enum class WignerConvention { integral_pi, unit };

struct WignerGrid {
    RealGrid x_axis, p_axis;     // axis descriptors (their sample vectors are unused)
    std::vector<double> values;  // row-major: values[ix * p_axis.n + ip]
    WignerConvention convention = WignerConvention::integral_pi;

    double& at(int ix, int ip) { return values[static_cast<size_t>(ix) * p_axis.n + ip]; }
    double at(int ix, int ip) const { return values[static_cast<size_t>(ix) * p_axis.n + ip]; }
    double integral() const;   // 2-D Simpson over both axes
    WignerGrid to_unit() const;  // divide by pi; only valid from integral_pi
};

// slice along a grid line: axis 'x' fixes x = value and runs over p,
// axis 'p' fixes p = value and runs over x
struct SliceSpec {
    char axis = 'x';
    double value = 0.0;
};

struct NegativityProfile {
    std::vector<double> coord, values;  // the extracted 1-D slice
    double min_value = 0.0;
    double argmin = 0.0;
    int sign_changes = 0;
    std::vector<double> crossings;      // interpolated zero positions
    double negative_integral = 0.0;     // Simpson integral of min(W, 0), <= 0
};

// W(x,p) = Int dy psi*(x-y) psi(x+y) e^{-2ipy}, Simpson in y over the
// largest window centered on x that stays inside psi's grid. psi must be
// normalized; every x-axis point must lie on a psi grid node (support_error
// if the axis leaves the grid, usage_error if misaligned). Values are real
// by construction (the y<0 half is the conjugate of the y>0 half).
WignerGrid wigner_pure(const WavefunctionGrid& psi, const RealGrid& x_axis,
                       const RealGrid& p_axis);

// Closed form for the infinite cubic-phase wave e^{i gamma x^3}:
//   W(x,p) = peak_scale * pi |4/(3 gamma)|^{1/3} Ai(|4/(3 gamma)|^{1/3}
//            sgn(gamma) (3 gamma x^2 - p)).
// peak_scale defaults to the natural density normalization; pass a
// calibration factor to compare against a windowed finite-norm surrogate
// (the ideal state itself is not square-integrable, so comparisons are
// shape comparisons). gamma = 0 is a plane wave and is rejected.
WignerGrid wigner_ideal_cubic(double gamma, const RealGrid& x_axis, const RealGrid& p_axis,
                              double peak_scale = 1.0);

// Weighted sum of member transforms (the transform is linear in the density
// matrix). Weights are used as stored; a truncated ensemble integrates to
// (1 - deficit) * pi.
WignerGrid wigner_mixed(const DetectionEnsemble& ensemble, const RealGrid& x_axis,
                        const RealGrid& p_axis);

// acc += weight * term; axes and convention tags must match exactly
void add_scaled(WignerGrid& acc, double weight, const WignerGrid& term);

NegativityProfile negativity_profile(const WignerGrid& w, const SliceSpec& line);

// e^{i gamma x^3} restricted to |x| <= window with a raised-cosine taper
// over the outer 10% of the window, zero beyond, L2-normalized. The finite-
// norm surrogate used wherever the non-normalizable target is compared
// against grid states.
WavefunctionGrid cubic_phase_window(double gamma, double window, const RealGrid& grid);

}  // namespace gkpsim
