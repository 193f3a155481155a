#ifndef BGMP_BGMP_HPP
#define BGMP_BGMP_HPP

#include "baselines.hpp"
#include "csv.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "instance_io.hpp"
#include "llr.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "prior.hpp"
#include "random.hpp"

#endif // BGMP_BGMP_HPP
