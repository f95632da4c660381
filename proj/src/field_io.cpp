#include "nilcmc/field_io.hpp"

#include <cstdio>
#include <memory>

#include "nilcmc/report.hpp"

namespace nilcmc {

namespace {
struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
} // namespace

void write_cfld(const std::string& path, const ComplexField& f) {
    f.grid.validate();
    require_finite(f, path.c_str());
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ParseError("cannot open for writing: " + path);
    std::fprintf(fp.get(), "# cfld1 nx=%d ny=%d hx=%s hy=%s x0=%s y0=%s\n",
                 f.grid.nx, f.grid.ny, fmt17(f.grid.hx).c_str(), fmt17(f.grid.hy).c_str(),
                 fmt17(f.grid.x0).c_str(), fmt17(f.grid.y0).c_str());
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const cd& z = f.at(i, j);
            std::fprintf(fp.get(), "%d,%d,%s,%s\n", i, j,
                         fmt17(z.real()).c_str(), fmt17(z.imag()).c_str());
        }
}

ComplexField read_cfld(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ParseError("cannot open: " + path);
    GridSpec g;
    if (std::fscanf(fp.get(), "# cfld1 nx=%d ny=%d hx=%lf hy=%lf x0=%lf y0=%lf\n",
                    &g.nx, &g.ny, &g.hx, &g.hy, &g.x0, &g.y0) != 6)
        throw ParseError("bad cfld header in " + path);
    g.validate();
    ComplexField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int ri = -1, rj = -1;
            double re = 0.0, im = 0.0;
            if (std::fscanf(fp.get(), "%d,%d,%lf,%lf\n", &ri, &rj, &re, &im) != 4)
                throw ParseError("truncated cfld data in " + path);
            if (ri != i || rj != j)
                throw ParseError("cfld rows out of order in " + path);
            f.at(i, j) = cd{re, im};
        }
    require_finite(f, path.c_str());
    return f;
}

} // namespace nilcmc
