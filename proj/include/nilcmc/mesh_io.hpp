#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nilcmc/immersion.hpp"

namespace nilcmc {

/// Quad mesh over the grid nodes, vertices `v x1 x2 x3`, faces 1-based, %.17g floats.
void export_obj(const std::string& path, const NilImmersion& f);

/// Legacy VTK 3.0 STRUCTURED_GRID; the title line carries the grid spacings and origin
/// so the immersion can be reparsed losslessly. Scalars become POINT_DATA arrays.
void export_vtk(const std::string& path, const NilImmersion& f,
                const std::vector<std::pair<std::string, const RealField*>>& scalars = {});

struct VtkData {
    NilImmersion f;
    std::vector<std::pair<std::string, RealField>> scalars;
};

VtkData read_vtk(const std::string& path);

} // namespace nilcmc
