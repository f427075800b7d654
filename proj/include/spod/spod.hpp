#pragma once

#include "spod/error.hpp"
#include "spod/parallel.hpp"
#include "spod/field_data.hpp"
#include "spod/shift.hpp"
#include "spod/low_rank.hpp"
#include "spod/transport.hpp"
#include "spod/decompose.hpp"
#include "spod/analytic.hpp"
#include "spod/io.hpp"
#include "spod/report.hpp"
