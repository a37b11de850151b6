#pragma once
#include "mfbm/fbm.hpp"
#include "mfbm/grid.hpp"

#include <string>

namespace mfbm {

// Fractional order used throughout the pathwise integration theory. Valid on
// its own for any alpha in (0, 1/2); when paired with a Hurst index the
// tighter window 1-H < alpha < 1/2 applies, which `from` enforces.
struct FracOrder {
    double alpha;

    static FracOrder of(double alpha);
    static FracOrder from(const HurstParam& hurst);
};

// Left-sided Weyl-Marchaud derivative of order alpha based at a:
//
//   D_{a+}^alpha f(t) = (1/Gamma(1-alpha)) [ f(t)/(t-a)^alpha
//                       + alpha int_a^t (f(t)-f(s))/(t-s)^{alpha+1} ds ]
//
// evaluated at every grid node strictly right of a. The node at t=a itself is
// singular and dropped from the output; when that happens and `warning` is
// non-null a short note is written to it. f must be scalar (dims == 1) and a
// must be a grid node. Each cell of the difference integral is done in closed
// form against the piecewise-linear reconstruction of f, so constants and
// straight lines come out exact.
GridPath weyl_forward(const GridPath& f, FracOrder alpha, double a,
                      std::string* warning = nullptr);

// Right-sided derivative of order 1-alpha of g_{b-} = g - g(b):
//
//   D_{b-}^{1-alpha} g_{b-}(t) = -(1/Gamma(alpha)) [ (g(t)-g(b))/(b-t)^{1-alpha}
//                       + (1-alpha) int_t^b (g(t)-g(s))/(s-t)^{2-alpha} ds ]
//
// evaluated at every grid node strictly left of b (the node at t=b is
// dropped, with the same warning convention). Same exactness on piecewise
// linear data as the forward operator.
GridPath weyl_backward(const GridPath& g, FracOrder alpha, double b,
                       std::string* warning = nullptr);

} // namespace mfbm
