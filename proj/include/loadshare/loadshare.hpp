#pragma once

#include "loadshare/version.hpp"
#include "loadshare/errors.hpp"
#include "loadshare/csv.hpp"
#include "loadshare/events.hpp"
#include "loadshare/root_find.hpp"
#include "loadshare/quadrature.hpp"
#include "loadshare/monotone_cubic.hpp"
#include "loadshare/monotone_map.hpp"
#include "loadshare/koenigs.hpp"
#include "loadshare/objective.hpp"
#include "loadshare/solver.hpp"
#include "loadshare/ingest.hpp"
#include "loadshare/model_io.hpp"
