#pragma once

#include "ncres/sampling.hpp"

namespace ncres::testing {
using namespace ncres::sampling;
}  // namespace ncres::testing
