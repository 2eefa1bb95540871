#include <catch2/catch.hpp>
#include <sstream>

#include "rsk/io.hpp"

using namespace rsk;

TEST_CASE("particle file parsing: comments, blanks, malformed lines") {
    std::istringstream in(
        "# protein-like toy system\n"
        "0.1 0.2 0.3 1.0\n"
        "\n"
        "  -0.4 0.0 0.25 -2.5\n"
        "# trailing comment\n");
    ParticleSystem sys = parse_particles(in);
    REQUIRE(sys.N() == 2);
    REQUIRE(sys.particles[1].charge == -2.5);
    REQUIRE(sys.particles[1].center[0] == Approx(-0.4));

    std::istringstream bad("0.1 0.2 oops 1.0\n");
    REQUIRE_THROWS_AS(parse_particles(bad), std::runtime_error);

    std::istringstream empty("# nothing\n");
    ParticleSystem none = parse_particles(empty);
    REQUIRE_THROWS_AS(none.validate(GridSpec(1.0, 8)), std::invalid_argument);
}

TEST_CASE("factor dump carries the header and column-major layout") {
    GridSpec g(2.0, 4);
    CanonicalTensor3 t(g, 2);
    t.factors[0] << 1, 5, 2, 6, 3, 7, 4, 8;
    std::ostringstream out;
    dump_factor_csv(out, t, 0);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "4,2,2");
    double v;
    in >> v;
    REQUIRE(v == 1);
    for (int skip = 0; skip < 4; ++skip) in >> v;
    REQUIRE(v == 5);  // second column starts after the first n values
}
