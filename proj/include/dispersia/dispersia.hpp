#pragma once

#include "dispersia/energies.hpp"
#include "dispersia/forces.hpp"
#include "dispersia/greens.hpp"
#include "dispersia/model.hpp"
#include "dispersia/specfun.hpp"
#include "dispersia/tensor.hpp"
