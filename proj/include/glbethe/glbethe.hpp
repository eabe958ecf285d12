#pragma once

#include "glbethe/bethe.hpp"
#include "glbethe/chain.hpp"
#include "glbethe/checks.hpp"
#include "glbethe/eigen.hpp"
#include "glbethe/error.hpp"
#include "glbethe/linalg.hpp"
#include "glbethe/matrix.hpp"
#include "glbethe/oracle.hpp"
#include "glbethe/polynomial.hpp"
#include "glbethe/repr.hpp"
#include "glbethe/scalar.hpp"
#include "glbethe/verify.hpp"
