#pragma once

#include "kcq/adversary.hpp"
#include "kcq/analysis.hpp"
#include "kcq/bits.hpp"
#include "kcq/info.hpp"
#include "kcq/keystream.hpp"
#include "kcq/parallel.hpp"
#include "kcq/protocol.hpp"
#include "kcq/qubit.hpp"
#include "kcq/rng.hpp"
#include "kcq/serialize.hpp"
