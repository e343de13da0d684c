#pragma once

#include "fairmat/rational.hpp"
#include "fairmat/errors.hpp"
#include "fairmat/guards.hpp"
#include "fairmat/item_set.hpp"
#include "fairmat/domain.hpp"
#include "fairmat/matroid.hpp"
#include "fairmat/simplex.hpp"
#include "fairmat/polytope.hpp"
#include "fairmat/sdrel.hpp"
#include "fairmat/frank_wolfe.hpp"
#include "fairmat/verify.hpp"
#include "fairmat/mechanisms.hpp"
#include "fairmat/instances.hpp"
#include "fairmat/io.hpp"
#include "fairmat/certificates.hpp"
#include "fairmat/impossibility.hpp"
