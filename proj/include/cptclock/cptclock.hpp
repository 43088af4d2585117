// Umbrella header.
#pragma once

#include "cptclock/analysis.hpp"
#include "cptclock/dicke.hpp"
#include "cptclock/errors.hpp"
#include "cptclock/husimi.hpp"
#include "cptclock/io.hpp"
#include "cptclock/lambda_cpt.hpp"
#include "cptclock/oracle_check.hpp"
#include "cptclock/protocols.hpp"
#include "cptclock/pulse.hpp"
#include "cptclock/sweep.hpp"
#include "cptclock/tensor_oracle.hpp"
