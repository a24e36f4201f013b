#pragma once

#include "spikelab/combinatorics.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/lanczos.hpp"
#include "spikelab/limit_laws.hpp"
#include "spikelab/matrix_lab.hpp"
#include "spikelab/monte_carlo.hpp"
#include "spikelab/report.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/tail_sampler.hpp"
