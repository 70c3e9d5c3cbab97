#pragma once

#include "scrible/algorithms.hpp"
#include "scrible/eigen.hpp"
#include "scrible/environments.hpp"
#include "scrible/errors.hpp"
#include "scrible/estimator.hpp"
#include "scrible/geometry.hpp"
#include "scrible/harness.hpp"
#include "scrible/io.hpp"
#include "scrible/newton.hpp"
#include "scrible/random.hpp"
#include "scrible/reduction.hpp"
