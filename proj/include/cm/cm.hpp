#pragma once

#include "cm/core.hpp"
#include "cm/affine.hpp"
#include "cm/quadratic.hpp"
#include "cm/metric.hpp"
#include "cm/cayley_menger.hpp"
