#pragma once

#include "venuerisk/epi.hpp"
#include "venuerisk/error.hpp"
#include "venuerisk/ingest.hpp"
#include "venuerisk/report.hpp"
#include "venuerisk/scenario.hpp"
#include "venuerisk/stats.hpp"
#include "venuerisk/synthetic.hpp"
#include "venuerisk/text.hpp"
