#pragma once

#include "susy/cylindrical.hpp"
#include "susy/darboux1d.hpp"
#include "susy/factorops.hpp"
#include "susy/moutard2d.hpp"
#include "susy/rational.hpp"
#include "susy/spectra.hpp"
#include "susy/superalgebra.hpp"
