#pragma once

#include "ffp/config.hpp"
#include "ffp/distributions.hpp"
#include "ffp/errors.hpp"
#include "ffp/experiments.hpp"
#include "ffp/families.hpp"
#include "ffp/format.hpp"
#include "ffp/partitions.hpp"
#include "ffp/point_process.hpp"
#include "ffp/polynomial.hpp"
#include "ffp/rational.hpp"
#include "ffp/rng.hpp"
#include "ffp/roots.hpp"
#include "ffp/series.hpp"
#include "ffp/statistics.hpp"
#include "ffp/transforms.hpp"
