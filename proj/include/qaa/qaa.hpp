#pragma once
/// Umbrella header: the full adiabatic-evolution analysis toolkit.

#include "qaa/classical_spin.hpp"
#include "qaa/driver_ensemble.hpp"
#include "qaa/matrix.hpp"
#include "qaa/parallel.hpp"
#include "qaa/phase_diagram.hpp"
#include "qaa/problem.hpp"
#include "qaa/rng.hpp"
#include "qaa/roots.hpp"
#include "qaa/semiclassical.hpp"
#include "qaa/spectral.hpp"
#include "qaa/spin_algebra.hpp"
