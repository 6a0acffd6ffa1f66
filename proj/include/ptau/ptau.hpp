#pragma once

// Everything except report.hpp, which additionally needs nlohmann/json.

#include "ptau/crossval.hpp"
#include "ptau/errors.hpp"
#include "ptau/params.hpp"
#include "ptau/piii.hpp"
#include "ptau/pv.hpp"
#include "ptau/real.hpp"
#include "ptau/schur.hpp"
#include "ptau/sequence.hpp"
#include "ptau/special.hpp"
#include "ptau/toeplitz.hpp"
