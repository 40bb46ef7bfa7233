#pragma once

#include "error.hpp"
#include "tolerance.hpp"
#include "matrix.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "qc_model.hpp"
#include "structures.hpp"
#include "relations.hpp"
#include "smoothing.hpp"
#include "boundary.hpp"
#include "check.hpp"
#include "json_io.hpp"
