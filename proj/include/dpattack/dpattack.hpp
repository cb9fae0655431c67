#pragma once

#include "dpattack/core/color.hpp"
#include "dpattack/core/errors.hpp"
#include "dpattack/core/tensor.hpp"
#include "dpattack/ddm/bilisearch.hpp"
#include "dpattack/ddm/dbs.hpp"
#include "dpattack/ddm/directions.hpp"
#include "dpattack/ddm/freq_stats.hpp"
#include "dpattack/ddm/pearson.hpp"
#include "dpattack/driver/attack.hpp"
#include "dpattack/driver/benchmark.hpp"
#include "dpattack/driver/config.hpp"
#include "dpattack/driver/report.hpp"
#include "dpattack/io/image_io.hpp"
#include "dpattack/oracle/http_oracle.hpp"
#include "dpattack/oracle/ledger.hpp"
#include "dpattack/oracle/oracle.hpp"
#include "dpattack/oracle/scripted.hpp"
#include "dpattack/search/boundary.hpp"
#include "dpattack/search/engines.hpp"
#include "dpattack/search/lambda.hpp"
#include "dpattack/search/partition.hpp"
#include "dpattack/search/prober.hpp"
#include "dpattack/search/state.hpp"
#include "dpattack/search/trace.hpp"
#include "dpattack/theory/alignment.hpp"
#include "dpattack/theory/complexity.hpp"
#include "dpattack/theory/montecarlo.hpp"
#include "dpattack/theory/synthetic_gradient.hpp"
#include "dpattack/transforms/bdct.hpp"
#include "dpattack/transforms/haar.hpp"
#include "dpattack/transforms/padding.hpp"
