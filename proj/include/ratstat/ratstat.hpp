#pragma once

// Symbol-count statistics for rational stochastic models.

#include "ratstat/error.hpp"
#include "ratstat/linalg.hpp"
#include "ratstat/perron.hpp"
#include "ratstat/model.hpp"
#include "ratstat/spectral.hpp"
#include "ratstat/exact.hpp"
#include "ratstat/rng.hpp"
#include "ratstat/sampler.hpp"
#include "ratstat/asymptotics.hpp"
#include "ratstat/deviations.hpp"
#include "ratstat/csv.hpp"
