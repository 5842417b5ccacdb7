#pragma once

#include "clonekit/core.hpp"
#include "clonekit/qlinalg.hpp"
#include "clonekit/states.hpp"
#include "clonekit/machine.hpp"
#include "clonekit/protocol.hpp"
#include "clonekit/synthesis.hpp"
#include "clonekit/analysis.hpp"
