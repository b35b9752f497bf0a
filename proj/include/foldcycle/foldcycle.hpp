#pragma once

#include "config.hpp"
#include "core.hpp"
#include "cycle.hpp"
#include "errors.hpp"
#include "flow_check.hpp"
#include "hybrid.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "normal_form.hpp"
#include "poincare.hpp"
