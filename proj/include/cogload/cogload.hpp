#pragma once

#include "cogload/channel.hpp"
#include "cogload/config_io.hpp"
#include "cogload/constraints.hpp"
#include "cogload/discretizer.hpp"
#include "cogload/errors.hpp"
#include "cogload/experiments.hpp"
#include "cogload/kkt.hpp"
#include "cogload/link_model.hpp"
#include "cogload/oracle.hpp"
#include "cogload/quadrature.hpp"
#include "cogload/report_io.hpp"
#include "cogload/rng.hpp"
#include "cogload/scenario.hpp"
#include "cogload/solver.hpp"
