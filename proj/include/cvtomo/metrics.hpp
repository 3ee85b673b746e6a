#pragma once

#include <vector>

#include "cvtomo/fock.hpp"
#include "cvtomo/povm.hpp"

namespace cvtomo {

// Transpose of the first mode's indices of a two-mode operator.
CMatrix partial_transpose_first(const CMatrix& rho, int dim_per_mode);

// (||rho^{T1}||_1 - 1) / 2; two modes only.
double negativity(const DensityMatrix& rho);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Pure arguments
// are detected and handled as <psi|other|psi>.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double trace_distance(const CMatrix& a, const CMatrix& b);

// Base-10 Shannon entropy of p_i = w_i Tr(rho E_i) / sum_j w_j Tr(rho E_j).
double shannon_entropy_probe(const DensityMatrix& rho, const std::vector<POVMElement>& probes);

} // namespace cvtomo
