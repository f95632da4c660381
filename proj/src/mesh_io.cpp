#include "nilcmc/mesh_io.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "nilcmc/report.hpp"

namespace nilcmc {

namespace {
struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_mesh_grid(const GridSpec& g) {
    if (g.nx < 2 || g.ny < 2 || !(g.hx > 0.0) || !(g.hy > 0.0))
        throw ParseError("mesh export needs at least a 2x2 grid");
}
} // namespace

void export_obj(const std::string& path, const NilImmersion& f) {
    check_mesh_grid(f.grid);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ParseError("cannot open for writing: " + path);
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const NilPoint& p = f.at(i, j);
            std::fprintf(fp.get(), "v %s %s %s\n", fmt17(p.x1).c_str(), fmt17(p.x2).c_str(),
                         fmt17(p.x3).c_str());
        }
    const int nx = f.grid.nx;
    for (int j = 0; j + 1 < f.grid.ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int a = j * nx + i + 1;
            std::fprintf(fp.get(), "f %d %d %d %d\n", a, a + 1, a + 1 + nx, a + nx);
        }
}

void export_vtk(const std::string& path, const NilImmersion& f,
                const std::vector<std::pair<std::string, const RealField*>>& scalars) {
    check_mesh_grid(f.grid);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ParseError("cannot open for writing: " + path);
    std::fprintf(fp.get(), "# vtk DataFile Version 3.0\n");
    std::fprintf(fp.get(), "nilcmc immersion hx=%s hy=%s x0=%s y0=%s\n",
                 fmt17(f.grid.hx).c_str(), fmt17(f.grid.hy).c_str(),
                 fmt17(f.grid.x0).c_str(), fmt17(f.grid.y0).c_str());
    std::fprintf(fp.get(), "ASCII\nDATASET STRUCTURED_GRID\n");
    std::fprintf(fp.get(), "DIMENSIONS %d %d 1\n", f.grid.nx, f.grid.ny);
    std::fprintf(fp.get(), "POINTS %zu double\n", f.grid.size());
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const NilPoint& p = f.at(i, j);
            std::fprintf(fp.get(), "%s %s %s\n", fmt17(p.x1).c_str(), fmt17(p.x2).c_str(),
                         fmt17(p.x3).c_str());
        }
    if (!scalars.empty()) {
        std::fprintf(fp.get(), "POINT_DATA %zu\n", f.grid.size());
        for (const auto& [name, field] : scalars) {
            require_same_grid(f.grid, field->grid, "vtk scalar");
            std::fprintf(fp.get(), "SCALARS %s double 1\nLOOKUP_TABLE default\n", name.c_str());
            for (int j = 0; j < f.grid.ny; ++j)
                for (int i = 0; i < f.grid.nx; ++i)
                    std::fprintf(fp.get(), "%s\n", fmt17(field->at(i, j)).c_str());
        }
    }
}

VtkData read_vtk(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ParseError("cannot open: " + path);
    char line[512];
    auto getline_or_fail = [&]() {
        if (!std::fgets(line, sizeof line, fp.get()))
            throw ParseError("truncated vtk file: " + path);
    };
    getline_or_fail(); // version banner
    GridSpec g;
    getline_or_fail();
    if (std::sscanf(line, "nilcmc immersion hx=%lf hy=%lf x0=%lf y0=%lf",
                    &g.hx, &g.hy, &g.x0, &g.y0) != 4)
        throw ParseError("vtk title line lacks grid metadata: " + path);
    getline_or_fail(); // ASCII
    getline_or_fail(); // DATASET
    if (!std::strstr(line, "STRUCTURED_GRID"))
        throw ParseError("vtk dataset is not STRUCTURED_GRID: " + path);
    getline_or_fail();
    int nz = 0;
    if (std::sscanf(line, "DIMENSIONS %d %d %d", &g.nx, &g.ny, &nz) != 3 || nz != 1)
        throw ParseError("bad vtk dimensions: " + path);
    getline_or_fail();
    std::size_t npts = 0;
    if (std::sscanf(line, "POINTS %zu", &npts) != 1 || npts != g.size())
        throw ParseError("bad vtk point count: " + path);

    VtkData out;
    out.f = NilImmersion(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            NilPoint& p = out.f.at(i, j);
            if (std::fscanf(fp.get(), "%lf %lf %lf\n", &p.x1, &p.x2, &p.x3) != 3)
                throw ParseError("truncated vtk points: " + path);
        }

    if (std::fgets(line, sizeof line, fp.get())) {
        std::size_t nd = 0;
        if (std::sscanf(line, "POINT_DATA %zu", &nd) == 1 && nd == g.size()) {
            while (std::fgets(line, sizeof line, fp.get())) {
                char name[128];
                if (std::sscanf(line, "SCALARS %127s double", name) != 1)
                    throw ParseError("bad vtk scalar header: " + path);
                getline_or_fail(); // LOOKUP_TABLE
                RealField field(g);
                for (std::size_t k = 0; k < g.size(); ++k)
                    if (std::fscanf(fp.get(), "%lf\n", &field.val[k]) != 1)
                        throw ParseError("truncated vtk scalars: " + path);
                out.scalars.emplace_back(name, std::move(field));
            }
        }
    }
    return out;
}

} // namespace nilcmc
