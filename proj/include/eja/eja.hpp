#pragma once

// Umbrella header for the EJA toolkit.

#include "eja/algebra.hpp"
#include "eja/axioms.hpp"
#include "eja/division.hpp"
#include "eja/embed_verify.hpp"
#include "eja/embedding.hpp"
#include "eja/entropy.hpp"
#include "eja/errors.hpp"
#include "eja/hypothesis.hpp"
#include "eja/maps.hpp"
#include "eja/rng.hpp"
#include "eja/sampling.hpp"
#include "eja/serialize.hpp"
#include "eja/spectral.hpp"
