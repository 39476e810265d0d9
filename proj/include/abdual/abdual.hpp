#pragma once

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"
#include "abdual/polynomial.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/wick_engine.hpp"
#include "abdual/rng.hpp"
#include "abdual/gaussian_oracle.hpp"
#include "abdual/bv_complex.hpp"
#include "abdual/wilson_thooft.hpp"
#include "abdual/json_io.hpp"
#include "abdual/verification.hpp"
