#pragma once

#include <doctest.h>

// doctest::Approx adds an absolute floor of one unit by default, which makes
// relative tolerances vacuous for quantities such as seconds or Pa m^3/s.
inline doctest::Approx rel_approx(double value) { return doctest::Approx(value).scale(0.0); }
