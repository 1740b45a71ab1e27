#pragma once

// Umbrella header for the decentralized secure aggregation library.

#include "dsa/common.hpp"
#include "dsa/entropy.hpp"
#include "dsa/field.hpp"
#include "dsa/keys.hpp"
#include "dsa/linalg.hpp"
#include "dsa/mds.hpp"
#include "dsa/protocol.hpp"
#include "dsa/serialize.hpp"
#include "dsa/sim.hpp"
