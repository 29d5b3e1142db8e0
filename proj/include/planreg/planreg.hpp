#pragma once

#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"
#include "planreg/queue.hpp"
#include "planreg/relaxation.hpp"
#include "planreg/bnb.hpp"
#include "planreg/instances.hpp"
#include "planreg/io.hpp"
#include "planreg/svg.hpp"
#include "planreg/workflow.hpp"
