#include "fracheat/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracheat/extension.hpp"

namespace fracheat {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot open for writing: " + tmp);
        out << content;
        if (!out.flush()) throw config_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw config_error("cannot rename into place: " + path);
    }
}

void write_field_csv(const std::string& path, const Field& f,
                     const std::vector<std::string>& comments) {
    const SpaceTimeGrid& g = f.grid;
    std::ostringstream out;
    out << "# grid " << g.n << ' ' << g.Nx << ' ' << g.Nt << ' ' << format_double(g.L)
        << ' ' << format_double(g.T) << '\n';
    out << "# real " << (f.real_flag ? 1 : 0) << '\n';
    for (const std::string& c : comments) out << "# " << c << '\n';
    if (g.n == 1) {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int it = 0; it < g.Nt; ++it) {
                const cplx& v = f.at(ix, it);
                out << ix << ',' << it << ',' << format_double(v.real()) << ','
                    << format_double(v.imag()) << '\n';
            }
    } else {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int iy = 0; iy < g.Nx; ++iy)
                for (int it = 0; it < g.Nt; ++it) {
                    const cplx& v = f.at(ix, iy, it);
                    out << ix << ',' << iy << ',' << it << ','
                        << format_double(v.real()) << ',' << format_double(v.imag())
                        << '\n';
                }
    }
    write_text_atomic(path, out.str());
}

Field read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open field CSV: " + path);
    std::string line;
    bool have_grid = false;
    int real_flag = -1;
    SpaceTimeGrid g;
    Field f;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tag;
            hs >> tag;
            if (tag == "grid" && !have_grid) {
                // only the first grid line is the header; later ones are
                // free-form provenance comments
                int n, Nx, Nt;
                double L, T;
                if (!(hs >> n >> Nx >> Nt >> L >> T))
                    throw config_error("malformed grid header in " + path);
                g = make_grid(n, Nx, Nt, L, T);
                f = Field(g);
                have_grid = true;
            } else if (tag == "real" && real_flag < 0) {
                hs >> real_flag;
            }
            continue;
        }
        if (!have_grid)
            throw config_error("field CSV missing '# grid' header: " + path);
        std::istringstream ls(line);
        long idx[3] = {0, 0, 0};
        double re, im;
        char sep;
        const int nidx = g.n + 1;
        for (int k = 0; k < nidx; ++k)
            if (!(ls >> idx[k] >> sep))
                throw config_error("malformed row in " + path + ": " + line);
        if (!(ls >> re)) throw config_error("malformed row in " + path + ": " + line);
        if (!(ls >> sep >> im)) throw config_error("malformed row in " + path + ": " + line);
        const int it = static_cast<int>(idx[nidx - 1]);
        const int ix = static_cast<int>(idx[0]);
        if (ix < 0 || ix >= g.Nx || it < 0 || it >= g.Nt)
            throw config_error("index out of range in " + path + ": " + line);
        if (g.n == 1) {
            f.at(ix, it) = cplx(re, im);
        } else {
            const int iy = static_cast<int>(idx[1]);
            if (iy < 0 || iy >= g.Nx)
                throw config_error("index out of range in " + path + ": " + line);
            f.at(ix, iy, it) = cplx(re, im);
        }
        ++rows;
    }
    if (!have_grid) throw config_error("field CSV missing '# grid' header: " + path);
    if (rows != f.grid.total())
        throw config_error("field CSV row count mismatch in " + path);
    if (real_flag >= 0) {
        f.real_flag = real_flag != 0;
    } else {
        f.real_flag = f.max_imag() == 0.0;
    }
    return f;
}

void write_extension_csv(const std::string& path, const ExtensionField& u,
                         const std::vector<std::string>& comments) {
    const SpaceTimeGrid& g = u.grid.base;
    std::ostringstream out;
    out << "# extgrid " << g.n << ' ' << g.Nx << ' ' << g.Nt << ' ' << u.grid.J() << '\n';
    out << "# base " << format_double(g.L) << ' ' << format_double(g.T) << ' '
        << format_double(u.grid.Y_max) << '\n';
    out << "# ynodes";
    for (double y : u.grid.y_nodes) out << ' ' << format_double(y);
    out << '\n';
    for (const std::string& c : comments) out << "# " << c << '\n';
    const int ny = u.ny();
    if (g.n == 1) {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int j = 0; j < ny; ++j)
                for (int it = 0; it < g.Nt; ++it)
                    out << ix << ',' << j << ',' << it << ','
                        << format_double(u.at(ix, j, it).real()) << '\n';
    } else {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int iy = 0; iy < g.Nx; ++iy)
                for (int j = 0; j < ny; ++j)
                    for (int it = 0; it < g.Nt; ++it)
                        out << ix << ',' << iy << ',' << j << ',' << it << ','
                            << format_double(u.at(ix, iy, j, it).real()) << '\n';
    }
    write_text_atomic(path, out.str());
}

Field extension_slice(const ExtensionField& u, int j) {
    if (j < 0 || j >= u.ny())
        throw config_error("extension_slice: height index out of range");
    const SpaceTimeGrid& g = u.grid.base;
    Field f(g, u.real_flag);
    if (g.n == 1) {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int it = 0; it < g.Nt; ++it) f.at(ix, it) = u.at(ix, j, it);
    } else {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int iy = 0; iy < g.Nx; ++iy)
                for (int it = 0; it < g.Nt; ++it)
                    f.at(ix, iy, it) = u.at(ix, iy, j, it);
    }
    return f;
}

} // namespace fracheat
