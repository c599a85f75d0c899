#pragma once

#include "synch/locks/clh_lock.hpp"
#include "synch/locks/lock_error.hpp"
#include "synch/locks/mcs_lock.hpp"
