#pragma once

#include "millopt/case_study.hpp"
#include "millopt/errors.hpp"
#include "millopt/es.hpp"
#include "millopt/model.hpp"
#include "millopt/optimize.hpp"
#include "millopt/oracle.hpp"
#include "millopt/report.hpp"
