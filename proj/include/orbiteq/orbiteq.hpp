#pragma once

#include "checked.hpp"
#include "matrix.hpp"
#include "point.hpp"
#include "function.hpp"
#include "tableau.hpp"
#include "transducer.hpp"
#include "certificate.hpp"
#include "intmat.hpp"
#include "invariants.hpp"
#include "equiv.hpp"
#include "report.hpp"
#include "suite.hpp"
