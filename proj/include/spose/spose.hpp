/// @file  spose.hpp
/// @brief Umbrella header for the whole library.

#pragma once

#include "spose/adam.hpp"
#include "spose/downstream.hpp"
#include "spose/evaluate.hpp"
#include "spose/io.hpp"
#include "spose/model.hpp"
#include "spose/parallel.hpp"
#include "spose/rng.hpp"
#include "spose/stats.hpp"
#include "spose/synthetic.hpp"
#include "spose/train.hpp"
#include "spose/types.hpp"
