#include <fstream>
#include <sstream>
#include <string>

#include "doc_generator.hpp"
#include "doctest.h"
#include "nambd/spacepi.hpp"

using namespace nambd;
using namespace nambd::spacepi;

namespace {

const char* kCanonicalModel = R"(# Comment lines and blank lines are skipped.
Position declarations
pos_F := x = 0 ^ y = 0 ^ z = 0
pos_M := rand(x,y,z) s.t. (x^2 + y^2 + z^2) = b
pos_E := rand(x,y,z) s.t. (x^2 + y^2 + z^2) = q

Radius declarations
r_react := 10
b := 50
q := 100

Potential of mean force declarations
f_pmf := not defined

Motion declarations
bMove() := x'^2 + y'^2 + z'^2 < q, x = pos_E(x) ^ y = pos_E(y) ^ z = pos_E(z) otherwise

Process definitions
FixedParticle = coll?(~, r_react).0
MovingParticle[bMove] = coll!(~, r_react).0
ExitParticle = coll?(~, r_react).0

Initial process
FixedParticle | MovingParticle | ExitParticle
)";

std::string slurp(const char* path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("canonical two-particle model parses") {
    const ModelDocument doc = parse_model(kCanonicalModel);

    REQUIRE(doc.positions.size() == 3);
    CHECK(doc.positions[0].name == "pos_F");
    CHECK(std::get<FixedPosition>(doc.positions[0].expr) == FixedPosition{0, 0, 0});
    CHECK(std::get<SphereRand>(doc.positions[1].expr).radius.name == "b");
    CHECK(std::get<SphereRand>(doc.positions[2].expr).radius.name == "q");

    REQUIRE(doc.radii.size() == 3);
    CHECK(doc.radii[0] == RadiusDecl{"r_react", 10});
    CHECK(doc.resolve_radius({std::nullopt, "q"}) == 100);

    CHECK(doc.pmf_name == "f_pmf");
    CHECK(!doc.pmf_expr);

    REQUIRE(doc.motions.size() == 1);
    CHECK(doc.motions[0].name == "bMove");
    CHECK(doc.motions[0].bound.name == "q");
    CHECK(doc.motions[0].escape_position == "pos_E");

    REQUIRE(doc.processes.size() == 3);
    CHECK(doc.processes[0].motion.empty());
    CHECK(doc.processes[1].motion == "bMove");
    const ProcessTerm& body = doc.processes[1].body;
    REQUIRE(body.kind == ProcessTerm::Kind::PrefixSum);
    REQUIRE(body.actions.size() == 1);
    CHECK(body.actions[0] == Action{"coll", true, {std::nullopt, "r_react"}});
    CHECK(body.continuations[0].kind == ProcessTerm::Kind::Nil);

    CHECK(doc.initial == std::vector<std::string>{"FixedParticle", "MovingParticle",
                                                  "ExitParticle"});
}

TEST_CASE("canonical model lowers to the expected geometry") {
    const LoweredModel m = lower_to_nam(parse_model(kCanonicalModel), 1.0);
    CHECK(m.geometry.a() == 10);
    CHECK(m.geometry.b() == 50);
    CHECK(m.geometry.q() == 100);
    CHECK(m.geometry.diffusion() == 1.0);
}

TEST_CASE("bundled model file matches the canonical document") {
    const ModelDocument bundled = parse_model(slurp(NAMBD_MODELS_DIR "/two_particle.spi"));
    CHECK(bundled == parse_model(kCanonicalModel));
}

TEST_CASE("format_model round-trips the canonical document") {
    const ModelDocument doc = parse_model(kCanonicalModel);
    const std::string text = format_model(doc);
    CHECK(parse_model(text) == doc);
    // Formatting is idempotent.
    CHECK(format_model(parse_model(text)) == text);
}

TEST_CASE("unicode aliases are accepted") {
    std::string text = kCanonicalModel;
    const auto swap = [&](const std::string& from, const std::string& to) {
        const size_t at = text.find(from);
        REQUIRE(at != std::string::npos);
        text.replace(at, from.size(), to);
    };
    swap("r_react := 10", "r_react ≔ 10");
    swap("pos_F := x = 0 ^ y = 0 ^ z = 0", "pos_F := x = 0 ∧ y = 0 ^ z = 0");
    swap("x'^2", "x'²");
    swap("coll?(~, r_react)", "coll?(∼, r_react)");
    CHECK(parse_model(text) == parse_model(kCanonicalModel));
}

TEST_CASE("missing sections are reported in order") {
    CHECK_THROWS_WITH_AS(parse_model(""), doctest::Contains("Position declarations"),
                         MissingSection);
    CHECK_THROWS_WITH_AS(parse_model("Position declarations\np := x = 0 ^ y = 0 ^ z = 0\n"),
                         doctest::Contains("Radius declarations"), MissingSection);
}

TEST_CASE("syntax errors carry a source location") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("r_react := 10");
    text.replace(at, 13, "r_react :: 10");
    try {
        parse_model(text);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.loc.line == 8);  // 1-based line in the source text
        CHECK(e.loc.col > 0);
        CHECK(std::string(e.what()).find("line 8") != std::string::npos);
    }
}

TEST_CASE("undeclared names are rejected") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("b := 50");
    text.replace(at, 7, "bb := 50");
    CHECK_THROWS_AS(parse_model(text), UndeclaredName);
}

TEST_CASE("duplicate declarations are rejected") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("q := 100");
    text.insert(at, "b := 51\n");
    CHECK_THROWS_AS(parse_model(text), DuplicateDeclaration);
}

TEST_CASE("a channel without a complementary action is rejected") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("coll!(~, r_react)");
    text.replace(at, 17, "coll2!(~, r_react)");
    CHECK_THROWS_AS(parse_model(text), UndeclaredName);
}

TEST_CASE("mismatched action radii on one channel are rejected") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("coll!(~, r_react)");
    text.replace(at, 17, "coll!(~, b)");
    CHECK_THROWS_AS(parse_model(text), UndeclaredName);
}

TEST_CASE("a defined potential parses verbatim and blocks lowering") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("f_pmf := not defined");
    text.replace(at, 20, "f_pmf := 4.7 * exp(-0.3*r) / r");
    const ModelDocument doc = parse_model(text);
    REQUIRE(doc.pmf_expr);
    CHECK(*doc.pmf_expr == "4.7 * exp(-0.3*r) / r");
    CHECK(parse_model(format_model(doc)) == doc);
    CHECK_THROWS_AS(lower_to_nam(doc, 1.0), NotNamShaped);
}

TEST_CASE("lowering rejects inverted sphere radii") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("q := 100");
    text.replace(at, 8, "q := 30");  // exit sphere inside the start sphere
    CHECK_THROWS_AS(lower_to_nam(parse_model(text), 1.0), OrderingViolation);
}

TEST_CASE("lowering rejects documents outside the two-particle shape") {
    // Two processes carrying movement functions.
    std::string two_movers = kCanonicalModel;
    const size_t at = two_movers.find("ExitParticle = ");
    two_movers.replace(at, 15, "ExitParticle[bMove] = ");
    CHECK_THROWS_AS(lower_to_nam(parse_model(two_movers), 1.0), NotNamShaped);

    // A name restriction in a process body.
    std::string with_new = kCanonicalModel;
    const size_t fx = with_new.find("FixedParticle = coll?(~, r_react).0");
    with_new.replace(fx, 35, "FixedParticle = (new priv) coll?(~, r_react).0");
    CHECK_THROWS_AS(lower_to_nam(parse_model(with_new), 1.0), NotNamShaped);

    // A fixed position away from the origin.
    std::string off_origin = kCanonicalModel;
    const size_t pf = off_origin.find("pos_F := x = 0 ^ y = 0 ^ z = 0");
    off_origin.replace(pf, 30, "pos_F := x = 1 ^ y = 0 ^ z = 0");
    CHECK_THROWS_AS(lower_to_nam(parse_model(off_origin), 1.0), NotNamShaped);
}

TEST_CASE("sum parsing binds prefixes tighter than '+'") {
    std::string text = kCanonicalModel;
    const size_t at = text.find("FixedParticle = coll?(~, r_react).0");
    text.replace(at, 35,
                 "FixedParticle = coll?(~, r_react).coll2?(~, 5).0 + coll2!(~, 5).0");
    const ModelDocument doc = parse_model(text);
    const ProcessTerm& body = doc.processes[0].body;
    REQUIRE(body.kind == ProcessTerm::Kind::PrefixSum);
    REQUIRE(body.actions.size() == 2);
    CHECK(body.actions[0].channel == "coll");
    CHECK(body.actions[1].channel == "coll2");
    REQUIRE(body.continuations[0].kind == ProcessTerm::Kind::PrefixSum);
    CHECK(body.continuations[0].actions[0].channel == "coll2");
    CHECK(body.continuations[1].kind == ProcessTerm::Kind::Nil);
    CHECK(parse_model(format_model(doc)) == doc);
}

TEST_CASE("generated documents round-trip through format_model") {
    docgen::DocumentGenerator gen(2026);
    for (int i = 0; i < 500; ++i) {
        const ModelDocument doc = gen.next();
        const std::string text = format_model(doc);
        CAPTURE(text);
        const ModelDocument back = parse_model(text);
        CHECK(back == doc);
        CHECK(format_model(back) == text);
    }
}
