#pragma once

/// @file biaswalk.hpp
/// Convenience header pulling in the whole library.

#include "biaswalk/embedder.hpp"
#include "biaswalk/error.hpp"
#include "biaswalk/evaluator.hpp"
#include "biaswalk/graph.hpp"
#include "biaswalk/ntriples.hpp"
#include "biaswalk/pipeline.hpp"
#include "biaswalk/rng.hpp"
#include "biaswalk/snapshot.hpp"
#include "biaswalk/synth.hpp"
#include "biaswalk/walker.hpp"
#include "biaswalk/weighting.hpp"
