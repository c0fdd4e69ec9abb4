#ifndef MAXLP_MAXLP_HPP
#define MAXLP_MAXLP_HPP

#include "maxlp/apps.hpp"
#include "maxlp/errors.hpp"
#include "maxlp/lp.hpp"
#include "maxlp/maxp.hpp"
#include "maxlp/metrics.hpp"
#include "maxlp/parallel.hpp"
#include "maxlp/pitch.hpp"
#include "maxlp/signal.hpp"
#include "maxlp/stats.hpp"
#include "maxlp/synth.hpp"
#include "maxlp/wav.hpp"

#endif
