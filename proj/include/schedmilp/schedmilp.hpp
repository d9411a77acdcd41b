// Umbrella header.
#pragma once

#include "schedmilp/assemble.hpp"
#include "schedmilp/errors.hpp"
#include "schedmilp/eval.hpp"
#include "schedmilp/extract.hpp"
#include "schedmilp/graph.hpp"
#include "schedmilp/identify.hpp"
#include "schedmilp/llm.hpp"
#include "schedmilp/lp.hpp"
#include "schedmilp/model.hpp"
#include "schedmilp/pipeline.hpp"
#include "schedmilp/registry.hpp"
#include "schedmilp/schema.hpp"
#include "schedmilp/solver.hpp"
