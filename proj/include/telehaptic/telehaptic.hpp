#pragma once

#include "telehaptic/bounds.hpp"
#include "telehaptic/dpm.hpp"
#include "telehaptic/feedback.hpp"
#include "telehaptic/metrics.hpp"
#include "telehaptic/mux.hpp"
#include "telehaptic/netsim/events.hpp"
#include "telehaptic/netsim/simulator.hpp"
#include "telehaptic/netsim/traffic.hpp"
#include "telehaptic/scenario.hpp"
#include "telehaptic/signal.hpp"
#include "telehaptic/trace.hpp"
#include "telehaptic/types.hpp"
#include "telehaptic/weber.hpp"
#include "telehaptic/wire.hpp"
