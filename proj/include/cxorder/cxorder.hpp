#pragma once

// Umbrella header.

#include "cxorder/numerics.hpp"
#include "cxorder/random.hpp"
#include "cxorder/envelope.hpp"
#include "cxorder/extremal.hpp"
#include "cxorder/comparison.hpp"
#include "cxorder/verifier.hpp"
#include "cxorder/tensorize.hpp"
