#pragma once

#include <string>

#include "nilcmc/field.hpp"

namespace nilcmc {

// CFLD/1: one header line
//   # cfld1 nx=<int> ny=<int> hx=<float> hy=<float> x0=<float> y0=<float>
// then nx*ny lines "i,j,re,im" in row-major order (j outer), floats as %.17g.

void write_cfld(const std::string& path, const ComplexField& f);
ComplexField read_cfld(const std::string& path);

} // namespace nilcmc
