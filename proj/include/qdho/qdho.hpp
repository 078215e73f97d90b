#pragma once

#include "qdho/deformation.hpp"
#include "qdho/errors.hpp"
#include "qdho/fock.hpp"
#include "qdho/matrix_elements.hpp"
#include "qdho/polynomials.hpp"
#include "qdho/spectra.hpp"
#include "qdho/su2.hpp"
#include "qdho/tridiagonal.hpp"
#include "qdho/xrep.hpp"
