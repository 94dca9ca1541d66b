#include "coexist/field_io.hpp"

#include <cstdio>
#include <fstream>

#include "coexist/errors.hpp"

namespace coexist {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string field_to_csv(const ScalarField& f) {
    const Grid& g = f.grid();
    std::string out;
    out.reserve(static_cast<size_t>(f.size()) * 48 + 16);
    if (g.dim() == 1) {
        out += "x,value\n";
        for (int i = 0; i < g.nx(); ++i) {
            out += format_full(g.x(i));
            out += ',';
            out += format_full(f[i]);
            out += '\n';
        }
    } else {
        out += "x,y,value\n";
        for (int iy = 0; iy < g.ny(); ++iy) {
            for (int ix = 0; ix < g.nx(); ++ix) {
                out += format_full(g.x(ix));
                out += ',';
                out += format_full(g.y(iy));
                out += ',';
                out += format_full(f[g.index(ix, iy)]);
                out += '\n';
            }
        }
    }
    return out;
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("cannot open output file: " + path);
    os << field_to_csv(f);
    if (!os)
        throw ConfigError("failed writing output file: " + path);
}

} // namespace coexist
