// Umbrella header for the needpaths library.
#pragma once

#include "needpaths/autodiff.hpp"
#include "needpaths/common.hpp"
#include "needpaths/embeddings.hpp"
#include "needpaths/kg.hpp"
#include "needpaths/linking.hpp"
#include "needpaths/manifest.hpp"
#include "needpaths/metrics.hpp"
#include "needpaths/model.hpp"
#include "needpaths/paths.hpp"
#include "needpaths/pipeline.hpp"
#include "needpaths/ranking.hpp"
#include "needpaths/scoring.hpp"
#include "needpaths/subgraph.hpp"
#include "needpaths/text.hpp"
