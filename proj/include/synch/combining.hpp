#pragma once

#include "synch/combining/cc_synch.hpp"
#include "synch/combining/dsm_synch.hpp"
#include "synch/combining/h_synch.hpp"
#include "synch/combining/oyama.hpp"
#include "synch/combining/psim.hpp"
#include "synch/combining/seq_object.hpp"
