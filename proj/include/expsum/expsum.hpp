#pragma once

// Everything in one include.

#include "arith.hpp"
#include "bessel.hpp"
#include "bilinear.hpp"
#include "charsums.hpp"
#include "cli.hpp"
#include "csv.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "fft.hpp"
#include "modarith.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "scans.hpp"
#include "verify.hpp"
#include "voronoi.hpp"
