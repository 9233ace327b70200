#pragma once

#include "rht/analysis.hpp"
#include "rht/core.hpp"
#include "rht/errors.hpp"
#include "rht/exact_inverse.hpp"
#include "rht/fast.hpp"
#include "rht/grid.hpp"
#include "rht/image_io.hpp"
#include "rht/transform2d.hpp"
