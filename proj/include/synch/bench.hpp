#pragma once

#include "synch/bench/cli.hpp"
#include "synch/bench/config.hpp"
#include "synch/bench/report.hpp"
#include "synch/bench/runner.hpp"
#include "synch/bench/targets.hpp"
#include "synch/bench/workload.hpp"
