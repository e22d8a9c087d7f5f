#pragma once

#include "topoeval/analysis.hpp"
#include "topoeval/bitset.hpp"
#include "topoeval/cli.hpp"
#include "topoeval/csv.hpp"
#include "topoeval/data.hpp"
#include "topoeval/error.hpp"
#include "topoeval/format.hpp"
#include "topoeval/manifest.hpp"
#include "topoeval/presheaf.hpp"
#include "topoeval/report.hpp"
#include "topoeval/topology.hpp"
#include "topoeval/version.hpp"
