#pragma once

// Spectral data of -d^2/dx^2 + q(x) on the zigzag graph Gamma^N, N odd:
// Hill transfer matrices, graph Lyapunov functions, bands/gaps/resonances,
// flat-band eigenfunctions and high-energy asymptotics.

#include "zigzag/asymptotics.hpp"
#include "zigzag/eigenfunctions.hpp"
#include "zigzag/errors.hpp"
#include "zigzag/hill.hpp"
#include "zigzag/lyapunov.hpp"
#include "zigzag/oracle.hpp"
#include "zigzag/potential.hpp"
#include "zigzag/rootscan.hpp"
#include "zigzag/spectra.hpp"
#include "zigzag/validate.hpp"
