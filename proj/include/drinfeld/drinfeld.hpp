#pragma once

#include "equidist.hpp"
#include "heights.hpp"
#include "integrality.hpp"
#include "newton.hpp"
