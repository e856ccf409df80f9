#pragma once

#include "totlab/errors.hpp"
#include "totlab/arith.hpp"
#include "totlab/rational.hpp"
#include "totlab/sieve.hpp"
#include "totlab/totient.hpp"
#include "totlab/analytic.hpp"
#include "totlab/counting.hpp"
#include "totlab/verify.hpp"
