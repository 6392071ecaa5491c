#pragma once

// Everything except the config reader (which needs yaml-cpp).

#include "gaudin/covering.hpp"
#include "gaudin/element.hpp"
#include "gaudin/field.hpp"
#include "gaudin/gaudin.hpp"
#include "gaudin/lie.hpp"
#include "gaudin/linalg.hpp"
#include "gaudin/oper.hpp"
#include "gaudin/operad.hpp"
#include "gaudin/sparse.hpp"
#include "gaudin/spectral.hpp"
#include "gaudin/tensor_space.hpp"
#include "gaudin/version.hpp"
