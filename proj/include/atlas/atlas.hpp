#pragma once

#include "atlas/error.hpp"
#include "atlas/rational.hpp"
#include "atlas/graph.hpp"
#include "atlas/scenario.hpp"
#include "atlas/exact.hpp"
#include "atlas/polytope.hpp"
#include "atlas/theta.hpp"
#include "atlas/exclusivity.hpp"
#include "atlas/linalg.hpp"
#include "atlas/quantum.hpp"
#include "atlas/seesaw.hpp"
#include "atlas/sic.hpp"
#include "atlas/bridge.hpp"
#include "atlas/io.hpp"
