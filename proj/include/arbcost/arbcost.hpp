#pragma once

#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/random.hpp"
#include "arbcost/parallel.hpp"
#include "arbcost/result.hpp"
#include "arbcost/trees.hpp"
#include "arbcost/rates.hpp"
#include "arbcost/lattice.hpp"
#include "arbcost/closed_form.hpp"
#include "arbcost/pde.hpp"
#include "arbcost/feynman_kac.hpp"
#include "arbcost/hedge.hpp"
