#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rsk/range_separation.hpp"

namespace rsk {

/// Parse a particle file: one `x y z q` line per particle (whitespace
/// separated, box coordinates); lines starting with '#' and blank lines are
/// ignored.
inline ParticleSystem parse_particles(std::istream& in) {
    ParticleSystem sys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        double x, y, z, q;
        if (!(ss >> x >> y >> z >> q))
            throw std::runtime_error("particle file: malformed line " + std::to_string(lineno));
        sys.particles.push_back({Eigen::Vector3d(x, y, z), q});
    }
    return sys;
}

inline ParticleSystem load_particles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open particle file: " + path);
    return parse_particles(in);
}

/// Column-major CSV dump of one factor matrix, preceded by a header line
/// `n,R,b`.
inline void dump_factor_csv(std::ostream& out, const CanonicalTensor3& t, int mode) {
    out << t.n() << "," << t.rank() << "," << t.grid.b << "\n";
    for (int q = 0; q < t.rank(); ++q)
        for (int i = 0; i < t.n(); ++i) out << t.factors[mode](i, q) << "\n";
}

}  // namespace rsk
