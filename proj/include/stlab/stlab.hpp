#ifndef STLAB_STLAB_HPP
#define STLAB_STLAB_HPP

#include "arith.hpp"
#include "cache.hpp"
#include "chebycomb.hpp"
#include "classnumbers.hpp"
#include "config.hpp"
#include "curves.hpp"
#include "family.hpp"
#include "hecke.hpp"
#include "moments.hpp"
#include "report.hpp"
#include "st_approx.hpp"
#include "verify.hpp"

#endif
