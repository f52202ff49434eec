#pragma once

// Umbrella header: dense complex matrices, Hermitian spectral kernels, the
// SU(N) generator basis with structure constants, pseudo-hermitian operator
// construction and certification, and balanced loss-gain lattice models.

#include "pseudoherm/eigen.hpp"
#include "pseudoherm/errors.hpp"
#include "pseudoherm/lattice.hpp"
#include "pseudoherm/matrix.hpp"
#include "pseudoherm/pseudo_hermitian.hpp"
#include "pseudoherm/su_basis.hpp"
