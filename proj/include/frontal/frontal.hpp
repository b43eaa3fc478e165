#pragma once

// Convenience umbrella: the full reconstruction toolkit.
//
// Pipeline overview: a map f into R^{n+1} with a well defined unit normal
// field nu determines the pair (nu, a = f . nu). These headers go the other
// way: express nu through spherical angles, differentiate the angles to set
// up a linear system for the tangential coefficients, and assemble
//
//   f = a nu + sum_j (b_j / rho_j) mu_hat_j,
//
// falling back to rotated charts at coordinate poles and to directional
// limit extrapolation where the angle system degenerates.

#include "frontal/dual.hpp"
#include "frontal/errors.hpp"
#include "frontal/map.hpp"
#include "frontal/grid.hpp"
#include "frontal/diffops.hpp"
#include "frontal/sphere_frame.hpp"
#include "frontal/singularities.hpp"
#include "frontal/recovery.hpp"
#include "frontal/perturbation.hpp"
#include "frontal/gallery.hpp"
#include "frontal/io.hpp"
