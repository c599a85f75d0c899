#pragma once

#include "synch/runtime/atomic_word.hpp"
#include "synch/runtime/barrier.hpp"
#include "synch/runtime/clock.hpp"
#include "synch/runtime/instrument.hpp"
#include "synch/runtime/node_pool.hpp"
#include "synch/runtime/reply.hpp"
#include "synch/runtime/thread_team.hpp"
#include "synch/runtime/work.hpp"
